/** DOM wiring for the review app: sidebar with targets + progress, candidate
 * cards with example and pronoun sentences, mouse and keyboard selection. */

import { ApiClient, ApiError } from "./api.js";
import type { Candidate, CandidatesResponse, TargetFilter } from "./api.js";
import { ReviewSession } from "./state.js";

const FILTERS: TargetFilter[] = ["all", "unreviewed", "entities", "relations"];

export class ReviewApp {
  session = new ReviewSession();
  private detail: CandidatesResponse | null = null;

  constructor(
    private api: ApiClient,
    private root: Document = document,
  ) {}

  async start(): Promise<void> {
    this.bindKeys();
    this.bindFilterButtons();
    await this.refreshTargets();
    const first = this.session.nextUnreviewed() ?? this.session.current();
    if (first) await this.openTarget(first.target);
    this.render();
  }

  async refreshTargets(): Promise<void> {
    try {
      const { targets, progress } = await this.api.listTargets("all");
      this.session.setTargets(targets, progress);
      this.setError(null);
    } catch (err) {
      this.setError(err);
    }
  }

  async openTarget(target: string): Promise<void> {
    this.session.goTo(target);
    try {
      this.detail = await this.api.candidates(target);
      this.setError(null);
    } catch (err) {
      this.detail = null;
      this.setError(err);
    }
    this.render();
  }

  /** rank is 1-based; null means "none of the candidates is correct". */
  async selectRank(rank: number | null): Promise<void> {
    if (!this.detail) return;
    const target = this.detail.target;
    let candidateId: string | null = null;
    if (rank !== null) {
      const candidate = this.detail.candidates[rank - 1];
      if (!candidate) return;
      candidateId = candidate.id;
    }
    try {
      await this.api.select(target, candidateId);
      this.setError(null);
    } catch (err) {
      this.setError(err);
      return;
    }
    const next = this.session.markReviewedAndAdvance(target);
    if (next && next.target !== target) {
      await this.openTarget(next.target);
    } else {
      await this.openTarget(target);
    }
  }

  // -- rendering -------------------------------------------------------------

  render(): void {
    this.renderProgress();
    this.renderTargetList();
    this.renderDetail();
  }

  private el(id: string): HTMLElement | null {
    return this.root.getElementById(id);
  }

  private renderProgress(): void {
    const box = this.el("progress");
    if (!box) return;
    const { targets, reviewed, remaining } = this.session.progress;
    const percent = targets ? Math.round((reviewed / targets) * 100) : 0;
    box.innerHTML = `
      <div class="bar"><div class="fill" style="width:${percent}%"></div></div>
      <span>${reviewed} / ${targets} reviewed (${remaining} left)</span>
      ${this.session.passComplete() ? '<span class="done">pass complete</span>' : ""}
    `;
  }

  private renderTargetList(): void {
    const list = this.el("targets");
    if (!list) return;
    const current = this.session.current();
    list.innerHTML = "";
    for (const row of this.session.visible()) {
      const item = this.root.createElement("li");
      item.textContent = `${row.target} ${row.reviewed ? "✓" : ""}`;
      item.className = [
        row.kind,
        row.reviewed ? "reviewed" : "pending",
        current && current.target === row.target ? "current" : "",
      ].join(" ");
      item.addEventListener("click", () => void this.openTarget(row.target));
      list.appendChild(item);
    }
  }

  private candidateCard(candidate: Candidate, selected: boolean): string {
    const phrase = candidate.phrase ?? candidate.template ?? "";
    const lines: string[] = [];
    if (candidate.example) lines.push(`<p class="example">${candidate.example}</p>`);
    if (candidate.pronoun_example)
      lines.push(`<p class="example pronoun">${candidate.pronoun_example}</p>`);
    if (candidate.notation)
      lines.push(`<p class="notation"><code>${candidate.notation}</code></p>`);
    const score =
      candidate.probability ?? candidate.confidence ?? candidate.score ?? null;
    return `
      <div class="candidate ${selected ? "selected" : ""}" data-id="${candidate.id}">
        <header><kbd>${candidate.rank}</kbd> <strong>${phrase}</strong>
          ${score !== null ? `<span class="score">${Number(score).toFixed(3)}</span>` : ""}
        </header>
        ${lines.join("\n")}
      </div>`;
  }

  private renderDetail(): void {
    const panel = this.el("detail");
    if (!panel) return;
    if (!this.detail) {
      panel.innerHTML = "<p>No target loaded.</p>";
      return;
    }
    const mine = this.detail.selections[this.api.selector];
    const marked = new Set(mine ? mine.candidates : []);
    const noneChosen = mine !== undefined && marked.size === 0;
    const cards = this.detail.candidates
      .map((c) => this.candidateCard(c, marked.has(c.id)))
      .join("\n");
    panel.innerHTML = `
      <h2>${this.detail.target} <small>${this.detail.kind}</small></h2>
      ${this.detail.anonymous ? '<p class="anonymous">anonymous entity</p>' : ""}
      ${cards || "<p>No candidates for this target.</p>"}
      <button id="none-correct" class="${noneChosen ? "selected" : ""}">
        none correct (n)
      </button>
    `;
    panel.querySelectorAll<HTMLElement>(".candidate").forEach((card, i) => {
      card.addEventListener("click", () => void this.selectRank(i + 1));
    });
    const none = this.el("none-correct");
    if (none) none.addEventListener("click", () => void this.selectRank(null));
  }

  private setError(err: unknown): void {
    const banner = this.el("error");
    if (!banner) return;
    if (!err) {
      banner.textContent = "";
      banner.classList.remove("visible");
      return;
    }
    const message =
      err instanceof ApiError
        ? err.status === 0
          ? `cannot reach the review service (${err.message})`
          : err.message
        : String(err);
    banner.textContent = message;
    banner.classList.add("visible");
  }

  // -- input -------------------------------------------------------------------

  private bindFilterButtons(): void {
    for (const filter of FILTERS) {
      const button = this.el(`filter-${filter}`);
      if (!button) continue;
      button.addEventListener("click", () => {
        this.session.setFilter(filter);
        const row = this.session.current();
        if (row) void this.openTarget(row.target);
        else this.render();
      });
    }
  }

  private bindKeys(): void {
    this.root.addEventListener("keydown", (event) => {
      const key = (event as KeyboardEvent).key;
      if (key >= "1" && key <= "9") {
        void this.selectRank(Number(key));
      } else if (key === "n" || key === "0") {
        void this.selectRank(null);
      } else if (key === "ArrowDown" || key === "j") {
        const row = this.session.move(1);
        if (row) void this.openTarget(row.target);
      } else if (key === "ArrowUp" || key === "k") {
        const row = this.session.move(-1);
        if (row) void this.openTarget(row.target);
      } else if (key === "f") {
        const next =
          FILTERS[(FILTERS.indexOf(this.session.filter) + 1) % FILTERS.length];
        this.session.setFilter(next);
        this.render();
      }
    });
  }
}
