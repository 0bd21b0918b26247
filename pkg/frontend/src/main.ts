import { ApiClient } from "./api.js";
import { ReviewApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const selector = params.get("selector") ?? "reviewer";
const app = new ReviewApp(new ApiClient("", selector));

window.addEventListener("DOMContentLoaded", () => {
  void app.start();
});
