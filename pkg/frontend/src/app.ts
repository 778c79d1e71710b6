/**
 * View-controller for live play. The server owns all game logic; this
 * module renders server state verbatim and posts user intents. The only
 * client-side computation is input validation (bid range) and the
 * positional mapping from tic-tac-toe cells to legal-move vertices
 * (the API lists a board's moves in ascending empty-cell order).
 */

import {
  ApiError,
  GameApi,
  GameState,
  Hint,
  NewGameSettings,
  PlayerId,
  Reveal,
} from "./api.js";

const BOARD_PATTERN = /^[.XO]{9}$/;

export class App {
  state: GameState | null = null;
  lastReveal: Reveal | null = null;
  hint: Hint | null = null;
  hintVisible = false;
  busy = false;
  error: string | null = null;

  constructor(
    private api: GameApi,
    private root: HTMLElement,
  ) {
    this.render();
  }

  // -- intents ---------------------------------------------------------------

  async newGame(settings: NewGameSettings): Promise<void> {
    await this.guard(async () => {
      const created = await this.api.createGame(settings);
      this.state = created.state;
      this.lastReveal = null;
      this.hint = null;
    });
  }

  async submitBid(bid: number): Promise<void> {
    if (!this.state || this.state.phase !== "awaiting_bid") return;
    const mine = this.myChips();
    if (!Number.isInteger(bid) || bid < 0 || bid > mine) {
      this.error = `bid must be a whole number between 0 and ${mine}`;
      this.render();
      return;
    }
    await this.guard(async () => {
      const response = await this.api.submitBid(this.state!.session_id, bid);
      this.lastReveal = response.reveal;
      this.state = response.state;
      await this.refreshHint();
    });
  }

  async designate(player: PlayerId, move?: string): Promise<void> {
    if (!this.state || this.state.phase !== "awaiting_human_move") return;
    await this.guard(async () => {
      const response = await this.api.submitMove(this.state!.session_id, player, move);
      this.state = response.state;
      await this.refreshHint();
    });
  }

  async toggleHint(): Promise<void> {
    this.hintVisible = !this.hintVisible;
    await this.refreshHint();
    this.render();
  }

  private async refreshHint(): Promise<void> {
    if (!this.hintVisible || !this.state || this.state.phase === "finished") {
      this.hint = null;
      return;
    }
    try {
      this.hint = await this.api.getHint(this.state.session_id);
    } catch {
      this.hint = null;
    }
  }

  private async guard(action: () => Promise<void>): Promise<void> {
    if (this.busy) return; // suppress double submits while in flight
    this.busy = true;
    this.error = null;
    this.render();
    try {
      await action();
    } catch (err) {
      this.error = err instanceof ApiError ? err.message : String(err);
    } finally {
      this.busy = false;
      this.render();
    }
  }

  // -- helpers ---------------------------------------------------------------

  myChips(): number {
    if (!this.state) return 0;
    return this.state.human === "A" ? this.state.chips.a : this.state.chips.b;
  }

  theirChips(): number {
    if (!this.state) return 0;
    return this.state.human === "A" ? this.state.chips.b : this.state.chips.a;
  }

  /** Empty-cell index -> legal move vertex, in the API's positional order. */
  cellMoves(): Map<number, string> {
    const mapping = new Map<number, string>();
    const s = this.state;
    if (!s || !BOARD_PATTERN.test(s.board) || !s.legal_moves) return mapping;
    let k = 0;
    for (let cell = 0; cell < 9; cell++) {
      if (s.board[cell] !== ".") continue;
      if (k < s.legal_moves.length) mapping.set(cell, s.legal_moves[k]);
      k++;
    }
    return mapping;
  }

  // -- rendering ---------------------------------------------------------------

  render(): void {
    const s = this.state;
    this.root.innerHTML = "";
    this.root.appendChild(this.renderSetup());
    if (this.error) {
      const banner = el("div", "banner error");
      banner.id = "error-banner";
      banner.textContent = this.error;
      this.root.appendChild(banner);
    }
    if (!s) return;
    this.root.appendChild(this.renderStatus(s));
    this.root.appendChild(this.renderChips(s));
    if (this.lastReveal) this.root.appendChild(this.renderReveal(this.lastReveal, s));
    this.root.appendChild(this.renderBoard(s));
    if (s.phase === "awaiting_bid") this.root.appendChild(this.renderBidPanel(s));
    if (s.phase === "awaiting_human_move") this.root.appendChild(this.renderMovePanel(s));
    this.root.appendChild(this.renderHintPanel());
    this.root.appendChild(this.renderHistory(s));
  }

  private renderSetup(): HTMLElement {
    const panel = el("div", "setup");
    panel.innerHTML = `
      <label>chips <input id="setup-chips" type="number" value="200" min="0"></label>
      <label>side
        <select id="setup-side"><option value="A">A (X)</option><option value="B">B (O)</option></select>
      </label>
      <label>seed <input id="setup-seed" type="number" placeholder="random"></label>
      <button id="new-game">new game</button>
    `;
    const button = panel.querySelector<HTMLButtonElement>("#new-game")!;
    button.disabled = this.busy;
    button.addEventListener("click", () => {
      const chips = Number(panel.querySelector<HTMLInputElement>("#setup-chips")!.value);
      const side = panel.querySelector<HTMLSelectElement>("#setup-side")!.value as PlayerId;
      const seedRaw = panel.querySelector<HTMLInputElement>("#setup-seed")!.value;
      const settings: NewGameSettings = { chips_total: chips, human_player: side };
      if (seedRaw !== "") settings.seed = Number(seedRaw);
      void this.newGame(settings);
    });
    return panel;
  }

  private renderStatus(s: GameState): HTMLElement {
    const status = el("div", "status");
    const phaseLabel =
      s.phase === "awaiting_bid"
        ? "place your sealed bid"
        : s.phase === "awaiting_human_move"
          ? s.must_move
            ? "you must move"
            : "you won the bid: move or pass the move"
          : "game over";
    status.innerHTML = `
      <span id="turn">turn ${s.turn}</span>
      <span id="phase">${phaseLabel}</span>
      <span id="advantage-badge" class="badge">advantage: ${s.advantage}${
        s.advantage === s.human ? " (you)" : ""
      }</span>
    `;
    if (s.phase === "finished" && s.winner) {
      const banner = el("div", "banner winner");
      banner.id = "winner-banner";
      banner.textContent =
        s.winner === s.human ? `you win (${s.winner})` : `engine wins (${s.winner})`;
      status.appendChild(banner);
    }
    return status;
  }

  private renderChips(s: GameState): HTMLElement {
    const total = s.chips.a + s.chips.b;
    const meters = el("div", "chips");
    const mine = this.myChips();
    const theirs = this.theirChips();
    meters.innerHTML = `
      <div class="meter"><span id="chips-mine">you: ${mine}</span>
        <div class="bar"><div class="fill" style="width:${total ? (100 * mine) / total : 0}%"></div></div>
      </div>
      <div class="meter"><span id="chips-theirs">engine: ${theirs}</span>
        <div class="bar"><div class="fill theirs" style="width:${total ? (100 * theirs) / total : 0}%"></div></div>
      </div>
    `;
    return meters;
  }

  private renderReveal(reveal: Reveal, s: GameState): HTMLElement {
    const box = el("div", "reveal");
    box.id = "reveal";
    const mineBid = s.human === "A" ? reveal.bid_a : reveal.bid_b;
    const theirBid = s.human === "A" ? reveal.bid_b : reveal.bid_a;
    const who = reveal.winner === s.human ? "you" : "engine";
    const how = reveal.reason === "advantage" ? " — won by advantage" : "";
    box.innerHTML = `
      <span id="reveal-bids">you bid ${mineBid}, engine bid ${theirBid}</span>
      <span id="reveal-winner" class="badge ${reveal.reason}">${who} won the bid${how}</span>
    `;
    return box;
  }

  private renderBoard(s: GameState): HTMLElement {
    if (!BOARD_PATTERN.test(s.board)) {
      const generic = el("div", "board generic");
      generic.id = "board";
      generic.innerHTML = `<span class="vertex">position: ${s.board}</span>`;
      return generic;
    }
    const grid = el("div", "board grid");
    grid.id = "board";
    const moves = this.cellMoves();
    const canMove =
      s.phase === "awaiting_human_move" &&
      (s.must_move == null || s.must_move === s.human) &&
      !this.busy;
    for (let cell = 0; cell < 9; cell++) {
      const cellButton = document.createElement("button");
      cellButton.className = "cell";
      cellButton.dataset.cell = String(cell);
      cellButton.textContent = s.board[cell] === "." ? "" : s.board[cell];
      const target = moves.get(cell);
      cellButton.disabled = !(canMove && target !== undefined);
      if (canMove && target !== undefined) {
        cellButton.classList.add("legal");
        cellButton.addEventListener("click", () => void this.designate(s.human, target));
      }
      grid.appendChild(cellButton);
    }
    return grid;
  }

  private renderBidPanel(s: GameState): HTMLElement {
    const panel = el("div", "bid-panel");
    const max = this.myChips();
    panel.innerHTML = `
      <input id="bid-input" type="number" min="0" max="${max}" value="0">
      <button id="bid-submit">bid</button>
    `;
    const input = panel.querySelector<HTMLInputElement>("#bid-input")!;
    const submit = panel.querySelector<HTMLButtonElement>("#bid-submit")!;
    input.disabled = this.busy || max === 0;
    if (max === 0) input.value = "0";
    submit.disabled = this.busy;
    submit.addEventListener("click", () => void this.submitBid(Number(input.value)));
    return panel;
  }

  private renderMovePanel(s: GameState): HTMLElement {
    const panel = el("div", "move-panel");
    const engineAllowed =
      (s.legal_designations ?? []).includes(s.engine) && s.must_move == null;
    if (!BOARD_PATTERN.test(s.board)) {
      // generic graphs: list the moves as buttons
      for (const move of s.legal_moves ?? []) {
        const b = document.createElement("button");
        b.className = "move";
        b.dataset.move = move;
        b.textContent = `move to ${move}`;
        b.disabled = this.busy || !(s.must_move == null || s.must_move === s.human);
        b.addEventListener("click", () => void this.designate(s.human, move));
        panel.appendChild(b);
      }
    }
    const pass = document.createElement("button");
    pass.id = "designate-engine";
    pass.textContent = "make opponent move";
    pass.disabled = this.busy || !engineAllowed;
    pass.addEventListener("click", () => void this.designate(s.engine));
    panel.appendChild(pass);
    return panel;
  }

  private renderHintPanel(): HTMLElement {
    const panel = el("div", "hint-panel");
    const toggle = document.createElement("button");
    toggle.id = "hint-toggle";
    toggle.textContent = this.hintVisible ? "hide hint" : "show hint";
    toggle.disabled = this.busy || !this.state || this.state.phase === "finished";
    toggle.addEventListener("click", () => void this.toggleHint());
    panel.appendChild(toggle);
    if (this.hintVisible && this.hint) {
      const chart = el("div", "hint-chart");
      chart.id = "hint-chart";
      this.hint.strategy.forEach((p, bid) => {
        if (p < 1e-9) return;
        const row = el("div", "hint-row");
        row.innerHTML = `
          <span class="hint-bid">bid ${bid}</span>
          <div class="hint-bar" style="width:${Math.round(200 * p)}px"></div>
          <span class="hint-prob" data-prob="${p}">${(100 * p).toFixed(1)}%</span>
        `;
        chart.appendChild(row);
      });
      const value = el("div", "hint-value");
      value.id = "hint-value";
      value.textContent = `win probability if both play optimally: ${this.hint.value}`;
      chart.appendChild(value);
      panel.appendChild(chart);
    }
    return panel;
  }

  private renderHistory(s: GameState): HTMLElement {
    const log = el("div", "history");
    log.id = "history";
    for (const entry of s.history.slice().reverse()) {
      const line = el("div", "history-entry");
      const move = entry.moved_to ? `, ${entry.mover} moved to ${entry.moved_to}` : "";
      const how = entry.reason === "advantage" ? " by advantage" : "";
      line.textContent =
        `#${entry.turn}: A bid ${entry.bid_a}, B bid ${entry.bid_b}; ` +
        `${entry.winner} won${how}${move} (chips ${entry.chips_after.a}/${entry.chips_after.b})`;
      log.appendChild(line);
    }
    return log;
  }
}

function el(tag: string, className: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  return node;
}
