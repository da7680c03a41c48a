import { SearchClient } from "./api";
import { initApp } from "./app";

const root = document.getElementById("app");
if (root) {
  // Served by the edge service under /ui; the API is same-origin.
  initApp(root, new SearchClient(""), { userId: "default" });
}
