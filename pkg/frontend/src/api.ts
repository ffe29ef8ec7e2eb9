import type { RatingRecord, SubmitResponse, TaskList } from "./types.js";

export class ConflictError extends Error {}
export class ValidationError extends Error {}

type Fetch = typeof fetch;

export interface ApiClient {
  fetchTasks(): Promise<TaskList>;
  submitRating(record: RatingRecord): Promise<SubmitResponse>;
  overlayUrl(image: string, token: string): string;
}

export function createApiClient(baseUrl = "", fetchImpl: Fetch = fetch): ApiClient {
  async function fetchTasks(): Promise<TaskList> {
    const resp = await fetchImpl(`${baseUrl}/api/tasks`);
    if (!resp.ok) {
      throw new Error(`task list request failed: ${resp.status}`);
    }
    return (await resp.json()) as TaskList;
  }

  async function submitRating(record: RatingRecord): Promise<SubmitResponse> {
    const resp = await fetchImpl(`${baseUrl}/api/ratings`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(record),
    });
    if (resp.status === 409) {
      throw new ConflictError(`rating already stored for ${record.image}`);
    }
    if (resp.status === 400) {
      const body = (await resp.json()) as { error?: string };
      throw new ValidationError(body.error ?? "rejected by server");
    }
    if (!resp.ok) {
      throw new Error(`submit failed: ${resp.status}`);
    }
    return (await resp.json()) as SubmitResponse;
  }

  return {
    fetchTasks,
    submitRating,
    overlayUrl: (image, token) => `${baseUrl}/api/overlay/${image}/${token}`,
  };
}
