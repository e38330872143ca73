/** Console controller: all state transitions, no direct DOM access.
 *
 * The view and the clock are injected so the whole loop runs under test
 * without a browser. Every decision about which pair to show stays on the
 * server; this file only moves answers back and forth.
 */

import { Answer, ApiClient, GONE, StatusSnapshot, Task } from "./api.js";

export interface ConsoleView {
  showTask(task: Task): void;
  showIdle(secondsLeft: number): void;
  showError(message: string): void;
  setBusy(busy: boolean): void;
  setAnswerCount(count: number): void;
}

export interface StatusView {
  showStatus(snapshot: StatusSnapshot): void;
  showStale(): void;
}

export interface Scheduler {
  set(callback: () => void, ms: number): number;
  clear(id: number): void;
}

export const realScheduler: Scheduler = {
  set: (callback, ms) => setTimeout(callback, ms) as unknown as number,
  clear: (id) => clearTimeout(id),
};

export interface ConsoleOptions {
  workerId?: string;
  retrySeconds?: number;
  scheduler?: Scheduler;
}

export class Console {
  private current: Task | null = null;
  private inFlight = false;
  private answered = 0;
  private countdown: number | null = null;
  private readonly workerId: string;
  private readonly retrySeconds: number;
  private readonly scheduler: Scheduler;

  constructor(
    private readonly api: ApiClient,
    private readonly view: ConsoleView,
    options: ConsoleOptions = {},
  ) {
    this.workerId = options.workerId ?? "console";
    this.retrySeconds = options.retrySeconds ?? 5;
    this.scheduler = options.scheduler ?? realScheduler;
  }

  get task(): Task | null {
    return this.current;
  }

  get answerCount(): number {
    return this.answered;
  }

  /** Fetch the next task and render it, or park on the idle countdown. */
  async refresh(): Promise<void> {
    this.cancelCountdown();
    let task: Task | null;
    try {
      task = await this.api.nextTask();
    } catch (error) {
      this.current = null;
      this.view.showError(error instanceof Error ? error.message : String(error));
      return;
    }
    if (task === null) {
      this.current = null;
      this.startCountdown(this.retrySeconds);
      return;
    }
    this.current = task;
    this.view.showTask(task);
  }

  /** Send the displayed task's answer; ignored while a submission is in flight. */
  async answer(answer: Answer): Promise<void> {
    if (this.inFlight || this.current === null) {
      return;
    }
    const task = this.current;
    this.inFlight = true;
    this.view.setBusy(true);
    try {
      const outcome = await this.api.submitAnswer(task.task_id, answer, this.workerId);
      if (outcome !== GONE) {
        this.answered += 1;
        this.view.setAnswerCount(this.answered);
      }
      // expired tasks are replaced silently, the session count is untouched
    } catch (error) {
      this.view.showError(error instanceof Error ? error.message : String(error));
      return;
    } finally {
      this.inFlight = false;
      this.view.setBusy(false);
    }
    await this.refresh();
  }

  /** Y and N answer the displayed task; everything else is ignored. */
  handleKey(key: string): void {
    const normalized = key.toLowerCase();
    if (normalized === "y") {
      void this.answer("yes");
    } else if (normalized === "n") {
      void this.answer("no");
    }
  }

  private startCountdown(secondsLeft: number): void {
    this.view.showIdle(secondsLeft);
    if (secondsLeft <= 0) {
      void this.refresh();
      return;
    }
    this.countdown = this.scheduler.set(() => this.startCountdown(secondsLeft - 1), 1000);
  }

  private cancelCountdown(): void {
    if (this.countdown !== null) {
      this.scheduler.clear(this.countdown);
      this.countdown = null;
    }
  }
}

export class StatusPanel {
  private timer: number | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly view: StatusView,
    private readonly intervalMs: number = 3000,
    private readonly scheduler: Scheduler = realScheduler,
  ) {}

  async poll(): Promise<void> {
    try {
      this.view.showStatus(await this.api.status());
    } catch {
      this.view.showStale();
    }
    this.timer = this.scheduler.set(() => void this.poll(), this.intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      this.scheduler.clear(this.timer);
      this.timer = null;
    }
  }
}

/** Format a status field; missing values render as a plain dash. */
export function formatMetric(value: number | undefined): string {
  if (value === undefined) {
    return "-";
  }
  return value.toFixed(3);
}
