/** Pure review-session state: target list, filtering, cursor movement and
 * progress. All server truth arrives via update calls; nothing here talks to
 * the network, which keeps the navigation logic unit-testable. */

import type { Progress, TargetFilter, TargetRow } from "./api.js";

export class ReviewSession {
  targets: TargetRow[] = [];
  progress: Progress = { targets: 0, reviewed: 0, remaining: 0 };
  filter: TargetFilter = "all";
  private cursor = 0;

  setTargets(targets: TargetRow[], progress: Progress): void {
    this.targets = targets;
    this.progress = progress;
    this.clampCursor();
  }

  setFilter(filter: TargetFilter): void {
    this.filter = filter;
    this.cursor = 0;
  }

  visible(): TargetRow[] {
    switch (this.filter) {
      case "unreviewed":
        return this.targets.filter((t) => !t.reviewed);
      case "entities":
        return this.targets.filter((t) => t.kind === "entity");
      case "relations":
        return this.targets.filter((t) => t.kind === "relation");
      default:
        return this.targets;
    }
  }

  current(): TargetRow | null {
    const rows = this.visible();
    return rows.length ? rows[Math.min(this.cursor, rows.length - 1)] : null;
  }

  currentIndex(): number {
    return Math.min(this.cursor, Math.max(this.visible().length - 1, 0));
  }

  move(delta: number): TargetRow | null {
    const rows = this.visible();
    if (!rows.length) return null;
    this.cursor = (this.currentIndex() + delta + rows.length) % rows.length;
    return rows[this.cursor];
  }

  goTo(target: string): TargetRow | null {
    const rows = this.visible();
    const idx = rows.findIndex((t) => t.target === target);
    if (idx < 0) return null;
    this.cursor = idx;
    return rows[idx];
  }

  /** Record a review locally and step to the next unreviewed target.
   * Returns the new current target, or null when the pass is complete. */
  markReviewedAndAdvance(target: string): TargetRow | null {
    const row = this.targets.find((t) => t.target === target);
    if (row && !row.reviewed) {
      row.reviewed = true;
      this.progress.reviewed += 1;
      this.progress.remaining = Math.max(0, this.progress.remaining - 1);
    }
    return this.nextUnreviewed();
  }

  nextUnreviewed(): TargetRow | null {
    const rows = this.visible();
    if (!rows.length) return null;
    const start = this.currentIndex();
    for (let step = 0; step < rows.length; step += 1) {
      const idx = (start + step) % rows.length;
      if (!rows[idx].reviewed) {
        this.cursor = idx;
        return rows[idx];
      }
    }
    return null;
  }

  passComplete(): boolean {
    return this.targets.length > 0 && this.targets.every((t) => t.reviewed);
  }

  private clampCursor(): void {
    const rows = this.visible();
    if (this.cursor >= rows.length) this.cursor = Math.max(0, rows.length - 1);
  }
}
