/** Typed client for the play service's /v1 JSON API. */

export type PlayerId = "A" | "B";
export type Phase = "awaiting_bid" | "awaiting_human_move" | "finished";

export interface Chips {
  a: number;
  b: number;
}

export interface HistoryEntry {
  turn: number;
  vertex: string;
  bid_a: number;
  bid_b: number;
  winner: PlayerId;
  reason: "higher-bid" | "advantage";
  chips_after: Chips;
  mover: PlayerId | null;
  moved_to: string | null;
}

export interface GameState {
  session_id: string;
  game: string;
  vertex: string;
  board: string;
  chips: Chips;
  human: PlayerId;
  engine: PlayerId;
  advantage: PlayerId;
  phase: Phase;
  turn: number;
  winner: PlayerId | null;
  history: HistoryEntry[];
  must_move?: PlayerId | null;
  legal_designations?: PlayerId[];
  legal_moves?: string[];
}

export interface Reveal {
  bid_a: number;
  bid_b: number;
  winner: PlayerId;
  reason: "higher-bid" | "advantage";
}

export interface BidResponse {
  reveal: Reveal;
  outcome: string;
  state: GameState;
}

export interface Hint {
  player: PlayerId;
  strategy: number[];
  value: number;
  error_bound: number;
}

export interface NewGameSettings {
  game?: string;
  chips_total?: number;
  human_player?: PlayerId;
  seed?: number;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      detail = body.detail ?? detail;
    } catch {
      /* not JSON */
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class GameApi {
  constructor(private baseUrl: string) {}

  createGame(settings: NewGameSettings): Promise<{ session_id: string; state: GameState }> {
    return request(`${this.baseUrl}/v1/games`, {
      method: "POST",
      body: JSON.stringify(settings),
    });
  }

  getState(sessionId: string): Promise<GameState> {
    return request(`${this.baseUrl}/v1/games/${sessionId}`);
  }

  submitBid(sessionId: string, bid: number): Promise<BidResponse> {
    return request(`${this.baseUrl}/v1/games/${sessionId}/bids`, {
      method: "POST",
      body: JSON.stringify({ bid }),
    });
  }

  submitMove(
    sessionId: string,
    designate: PlayerId,
    move?: string,
  ): Promise<{ state: GameState }> {
    return request(`${this.baseUrl}/v1/games/${sessionId}/moves`, {
      method: "POST",
      body: JSON.stringify({ designate, move: move ?? null }),
    });
  }

  getHint(sessionId: string): Promise<Hint> {
    return request(`${this.baseUrl}/v1/games/${sessionId}/hint`);
  }
}
