/**
 * Typed client for the study service HTTP JSON API. This is the only
 * backend the frontend talks to.
 */

export interface NextTrialPayload {
  done: boolean;
  pair_id?: string;
  dataset?: string;
  target_name?: string;
  image_width?: number;
  image_height?: number;
  image_url?: string;
  started_token?: string;
}

export interface TrialAck {
  recorded: boolean;
  hit: boolean;
  duration_ms: number;
  shown_at: number;
  found_at: number;
}

export interface DatasetSummary {
  dataset: string;
  mean_original: number;
  mean_inpainted: number;
  improvement_pct: number;
  volunteers_original: number;
  volunteers_inpainted: number;
}

export interface StudyReport {
  aggregation: string;
  excluded_volunteers: string[];
  datasets: DatasetSummary[];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

/** Network failures (server unreachable) as opposed to API rejections. */
export class NetworkError extends Error {}

export type FetchLike = typeof fetch;

export class StudyApi {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = fetch
  ) {}

  resolve(path: string): string {
    return this.baseUrl + path;
  }

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.resolve(path), init);
    } catch (err) {
      throw new NetworkError(String(err));
    }
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return response.json();
  }

  private post(path: string, body: unknown): Promise<unknown> {
    return this.request(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async createStudy(plan: unknown): Promise<string> {
    const doc = (await this.post("/studies", plan)) as { study_id: string };
    return doc.study_id;
  }

  async openSession(studyId: string, volunteerId: string, group: string): Promise<string> {
    const doc = (await this.post(`/studies/${studyId}/sessions`, {
      volunteer_id: volunteerId,
      group: group,
    })) as { session_id: string };
    return doc.session_id;
  }

  nextTrial(sessionId: string): Promise<NextTrialPayload> {
    return this.request(`/sessions/${sessionId}/next`) as Promise<NextTrialPayload>;
  }

  submitTrial(
    sessionId: string,
    pairId: string,
    startedToken: string,
    click: { x: number; y: number },
    clientDurationMs: number
  ): Promise<TrialAck> {
    return this.post(`/sessions/${sessionId}/trials`, {
      pair_id: pairId,
      started_token: startedToken,
      click: click,
      client_duration_ms: Math.round(clientDurationMs),
    }) as Promise<TrialAck>;
  }

  report(studyId: string, hitsOnly = false): Promise<StudyReport> {
    const query = hitsOnly ? "?hits_only=true" : "";
    return this.request(`/studies/${studyId}/report${query}`) as Promise<StudyReport>;
  }
}
