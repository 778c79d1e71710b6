import { GameApi } from "./api.js";
import { App } from "./app.js";

declare global {
  interface Window {
    BIDSOLVE_API_URL?: string;
  }
}

const base = window.BIDSOLVE_API_URL ?? "http://127.0.0.1:8000";
const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");
new App(new GameApi(base), root);
