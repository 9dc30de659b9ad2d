import { ApiClient } from "./api.js";
import { SessionApp } from "./app.js";

document.addEventListener("DOMContentLoaded", () => {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app root");
  // Same-origin by default; served at /ui by the API process.
  const app = new SessionApp(new ApiClient(""));
  app.mount(root);
});
