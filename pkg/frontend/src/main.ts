/** Browser wiring: binds the controller to the static page. */

import { ApiClient, StatusSnapshot, Task } from "./api.js";
import { Console, ConsoleView, StatusPanel, StatusView, formatMetric } from "./console.js";

function byId(id: string): HTMLElement {
  const element = document.getElementById(id);
  if (element === null) {
    throw new Error(`missing element #${id}`);
  }
  return element;
}

function renderPayload(container: HTMLElement, payload: Task["records"][number]): void {
  container.textContent = "";
  const label = document.createElement("div");
  label.className = "record-id";
  label.textContent = payload.record;
  container.appendChild(label);
  if (payload.kind === "image") {
    const image = document.createElement("img");
    image.src = payload.value;
    image.alt = payload.record;
    container.appendChild(image);
  } else {
    const text = document.createElement("div");
    text.className = "record-text";
    text.textContent = payload.value;
    container.appendChild(text);
  }
}

function makeView(): ConsoleView {
  const question = byId("question");
  const left = byId("record-left");
  const right = byId("record-right");
  const idle = byId("idle");
  const taskPane = byId("task");
  const banner = byId("error");
  const count = byId("answer-count");
  const yes = byId("answer-yes") as HTMLButtonElement;
  const no = byId("answer-no") as HTMLButtonElement;
  return {
    showTask(task) {
      banner.hidden = true;
      idle.hidden = true;
      taskPane.hidden = false;
      question.textContent = task.question;
      renderPayload(left, task.records[0]);
      renderPayload(right, task.records[1]);
    },
    showIdle(secondsLeft) {
      taskPane.hidden = true;
      banner.hidden = true;
      idle.hidden = false;
      idle.textContent = `No tasks available, retrying in ${secondsLeft}s`;
    },
    showError(message) {
      banner.hidden = false;
      banner.textContent = `${message} (press R to retry)`;
    },
    setBusy(busy) {
      yes.disabled = busy;
      no.disabled = busy;
    },
    setAnswerCount(value) {
      count.textContent = String(value);
    },
  };
}

function makeStatusView(): StatusView {
  const cost = byId("status-cost");
  const clusters = byId("status-clusters");
  const open = byId("status-open");
  const f = byId("status-f");
  const stale = byId("status-stale");
  return {
    showStatus(snapshot: StatusSnapshot) {
      stale.hidden = true;
      cost.textContent = String(snapshot.cost);
      clusters.textContent = String(snapshot.clusters);
      open.textContent = String(snapshot.open_tasks);
      f.textContent = formatMetric(snapshot.f);
    },
    showStale() {
      stale.hidden = false;
    },
  };
}

const api = new ApiClient("");
const console_ = new Console(api, makeView(), { workerId: `w-${Date.now()}` });
const panel = new StatusPanel(api, makeStatusView());

byId("answer-yes").addEventListener("click", () => void console_.answer("yes"));
byId("answer-no").addEventListener("click", () => void console_.answer("no"));
document.addEventListener("keydown", (event) => {
  if (event.key.toLowerCase() === "r") {
    void console_.refresh();
    return;
  }
  console_.handleKey(event.key);
});

void console_.refresh();
void panel.poll();
