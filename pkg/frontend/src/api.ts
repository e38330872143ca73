/** Thin typed client for the task service's three endpoints. */

export interface RecordPayload {
  record: string;
  kind: "image" | "text";
  value: string;
}

export interface Task {
  task_id: string;
  pair: [string, string];
  records: [RecordPayload, RecordPayload];
  question: string;
}

export interface StatusSnapshot {
  cost: number;
  clusters: number;
  open_tasks: number;
  precision?: number;
  recall?: number;
  f?: number;
}

export type Answer = "yes" | "no";

/** Submitting against a reclaimed or unknown task id. */
export const GONE = Symbol("gone");

export type Fetcher = (input: string, init?: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetcher: Fetcher = (input, init) => fetch(input, init),
  ) {}

  /** Next open pair, or null when the queue has nothing to serve (204). */
  async nextTask(): Promise<Task | null> {
    const response = await this.fetcher(`${this.base}/task`);
    if (response.status === 204) {
      return null;
    }
    if (!response.ok) {
      throw new ServiceError(response.status, `GET /task failed with ${response.status}`);
    }
    return (await response.json()) as Task;
  }

  /** New total cost on success, GONE when the task id is no longer live. */
  async submitAnswer(taskId: string, answer: Answer, workerId: string): Promise<number | typeof GONE> {
    const response = await this.fetcher(`${this.base}/answer`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ task_id: taskId, answer, worker_id: workerId }),
    });
    if (response.status === 410) {
      return GONE;
    }
    if (!response.ok) {
      throw new ServiceError(response.status, `POST /answer failed with ${response.status}`);
    }
    const body = (await response.json()) as { cost: number };
    return body.cost;
  }

  async status(): Promise<StatusSnapshot> {
    const response = await this.fetcher(`${this.base}/status`);
    if (!response.ok) {
      throw new ServiceError(response.status, `GET /status failed with ${response.status}`);
    }
    return (await response.json()) as StatusSnapshot;
  }
}
