// Typed client for the evaluation service. All state lives on the server;
// the client only ever sees opaque asset tokens.

export interface SessionView {
  session_id: string;
  observer_id: string;
  image_set_id: string;
  images: string[];
  current_image: string | null;
  stage: string;
  done: boolean;
}

export interface MosaicSlot {
  slot: number;
  token: string;
  url: string;
  blank: boolean;
}

export interface Stage1Manifest {
  session_id: string;
  image_id: string;
  rows: number;
  cols: number;
  reference_url: string;
  slots: MosaicSlot[];
}

export interface Stage2Candidate {
  token: string;
  url: string;
}

export interface Stage2Manifest {
  session_id: string;
  image_id: string;
  candidates: Stage2Candidate[];
}

export interface TallyView {
  image_set_id: string;
  cohort: string | null;
  final_counts: Record<string, number>;
  stage1_counts: Record<string, number>;
  total_final: number;
  total_stage1: number;
  completed_pairs: number;
}

export class ApiError extends Error {
  constructor(public readonly status: number, message: string) {
    super(message);
    this.name = 'ApiError';
  }

  get isConflict(): boolean {
    return this.status === 409;
  }
}

export class ApiClient {
  constructor(private readonly base: string = '') {}

  assetUrl(path: string): string {
    return this.base + path;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.base + path, init);
    } catch (err) {
      throw new ApiError(0, `network failure: ${String(err)}`);
    }
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = await response.json();
        if (body && typeof body.detail === 'string') detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(payload),
    });
  }

  createSession(observerId: string, imageSetId: string, seed?: string): Promise<SessionView> {
    return this.post('/sessions', {
      observer_id: observerId,
      image_set_id: imageSetId,
      seed: seed ?? null,
    });
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.request(`/sessions/${sessionId}`);
  }

  stage1(sessionId: string, imageId: string): Promise<Stage1Manifest> {
    return this.request(`/sessions/${sessionId}/images/${imageId}/stage1`);
  }

  submitStage1(sessionId: string, imageId: string, picks: string[]): Promise<unknown> {
    return this.post(`/sessions/${sessionId}/images/${imageId}/stage1`, { picks });
  }

  stage2(sessionId: string, imageId: string): Promise<Stage2Manifest> {
    return this.request(`/sessions/${sessionId}/images/${imageId}/stage2`);
  }

  submitFinal(sessionId: string, imageId: string, pick: string): Promise<unknown> {
    return this.post(`/sessions/${sessionId}/images/${imageId}/final`, { pick });
  }

  tally(set: string, cohort?: string): Promise<TallyView> {
    const query = cohort ? `?set=${set}&cohort=${cohort}` : `?set=${set}`;
    return this.request(`/tally${query}`);
  }
}
