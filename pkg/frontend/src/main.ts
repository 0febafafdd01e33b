// Browser entry point. The dashboard talks to the origin it was served
// from, which is the service process itself when started with
// `methodmover serve --frontend`.

import { ApiClient } from "./api.js";
import { Dashboard } from "./app.js";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}
void new Dashboard(new ApiClient(""), root).start();
