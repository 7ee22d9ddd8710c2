// Browser bootstrap: start form, hot-seat screen, 1-second polling.

import { AppController } from "./app.js";

const SERVER = (window as { FAIRDIV_SERVER?: string }).FAIRDIV_SERVER ?? "http://127.0.0.1:8400";

function main(): void {
  const root = document.getElementById("app");
  const form = document.getElementById("start-form") as HTMLFormElement | null;
  if (!root || !form) {
    throw new Error("missing #app or #start-form");
  }
  const controller = new AppController(SERVER, root);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const d = Number((document.getElementById("tenants") as HTMLInputElement).value);
    const rent = (document.getElementById("rent") as HTMLInputElement).value;
    const epsilon = (document.getElementById("epsilon") as HTMLInputElement).value;
    void controller.start(d, rent, epsilon).then((state) => {
      if (state !== null) {
        form.hidden = true;
      }
    });
  });

  // Hot-seat polling keeps spectators in sync if several browsers watch the
  // same session; answers already re-render from the POST response.
  setInterval(() => {
    if (controller.sessionId !== null && !controller.finished) {
      void controller.refresh();
    }
  }, 1000);
}

main();
