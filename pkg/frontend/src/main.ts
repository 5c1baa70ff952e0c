/**
 * Entry point. The API base defaults to the page origin; override with
 * ?api=http://host:port when the service runs elsewhere during
 * development.
 */

import { AdminPoller } from "./admin.js";
import { ApiClient } from "./api.js";
import { ChatController } from "./chat.js";
import { mountApp } from "./ui.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("api") ?? window.location.origin;

const api = new ApiClient(baseUrl);
const controller = new ChatController(api);
const poller = new AdminPoller(api);

const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app mount point");
}
mountApp(root, controller, poller);
