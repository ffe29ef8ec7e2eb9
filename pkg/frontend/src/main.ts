import { ConflictError, ValidationError, createApiClient } from "./api.js";
import { AnnotationSession } from "./session.js";
import { renderTask } from "./view.js";

const RETRY_INTERVAL_MS = 5000;

async function start(): Promise<void> {
  const root = document.getElementById("app");
  const status = document.getElementById("status");
  if (!root || !status) throw new Error("missing #app/#status mount points");

  const api = createApiClient();
  const rater = window.prompt("Rater ID (e.g. your initials):")?.trim();
  if (!rater) {
    status.textContent = "A rater ID is required; reload to start over.";
    return;
  }

  const { tasks } = await api.fetchTasks();
  const session = new AnnotationSession(rater, tasks);

  const rerender = () =>
    renderTask(root, session, api, {
      onChange: rerender,
      onSubmit: () => {
        void session
          .submitCurrent(api)
          .then((outcome) => {
            status.textContent = outcome === "queued" ? "Saved locally; will retry." : "";
            rerender();
          })
          .catch((err) => {
            if (err instanceof ConflictError || err instanceof ValidationError) {
              status.textContent = err.message;
            } else {
              throw err;
            }
          });
      },
    });
  rerender();

  window.setInterval(() => {
    if (session.pendingCount > 0) {
      void session.flushPending(api).then((left) => {
        status.textContent = left > 0 ? `${left} rating(s) still queued.` : "";
      });
    }
  }, RETRY_INTERVAL_MS);
}

void start();
