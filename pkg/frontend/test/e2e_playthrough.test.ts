/**
 * End-to-end playthrough against a live play service: a full 200-chip
 * tic-tac-toe game driven through the DOM with a fixed seed.
 *
 * The engine's bids are deterministic per seed, so a probe session with
 * the same seed reveals the engine's first bid; matching it in the real
 * session forces a tie that the human (A, equal chips) wins by
 * advantage, exercising the advantage reveal deterministically.
 *
 * The server is spawned here (building the 200-chip table first if no
 * cached copy exists; that build takes a few minutes once).
 */

// @vitest-environment jsdom

import { ChildProcess, execFileSync, spawn } from "node:child_process";
import { existsSync, mkdirSync } from "node:fs";
import path from "node:path";
import { fileURLToPath } from "node:url";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { GameApi } from "../src/api.js";
import { App } from "../src/app.js";

const HERE = path.dirname(fileURLToPath(import.meta.url));
const REPO_ROOT = path.resolve(HERE, "..", "..");
const TABLE = path.resolve(HERE, "..", ".cache", "ttt_n200.npz");
const PORT = 8917;
const BASE = `http://127.0.0.1:${PORT}`;
const SEED = 424242;

let server: ChildProcess | null = null;

async function sleep(ms: number): Promise<void> {
  await new Promise((resolve) => setTimeout(resolve, ms));
}

async function waitFor(cond: () => boolean, ms = 15000, step = 25): Promise<void> {
  const start = Date.now();
  while (!cond()) {
    if (Date.now() - start > ms) throw new Error("timed out waiting for condition");
    await sleep(step);
  }
}

beforeAll(async () => {
  if (!existsSync(TABLE)) {
    mkdirSync(path.dirname(TABLE), { recursive: true });
    // one-time: solve tic-tac-toe at 200 chips and persist the table
    execFileSync(
      "python3",
      ["-m", "bidsolve", "solve", "--game", "ttt", "--chips", "200",
       "--x", "1e-7", "--out", TABLE],
      { cwd: REPO_ROOT, stdio: "ignore", timeout: 3_600_000 },
    );
  }
  server = spawn(
    "python3",
    ["-m", "bidsolve", "serve", "--port", String(PORT), "--game", "ttt",
     "--chips", "200", "--pretable", TABLE],
    { cwd: REPO_ROOT, stdio: "ignore" },
  );
  const deadline = Date.now() + 120_000;
  for (;;) {
    try {
      const ping = await fetch(`${BASE}/v1/games/ready-probe`);
      if (ping.status === 404) break; // routing is up
    } catch {
      /* not listening yet */
    }
    if (Date.now() > deadline) throw new Error("server did not come up");
    await sleep(250);
  }
}, 3_700_000);

afterAll(() => {
  server?.kill();
});

describe("scripted 200-chip tic-tac-toe playthrough", () => {
  it("completes a full game with chip conservation and an advantage reveal", async () => {
    const api = new GameApi(BASE);

    // probe session: learn the engine's deterministic first bid for SEED
    const probe = await api.createGame({
      game: "ttt",
      chips_total: 200,
      human_player: "A",
      seed: SEED,
    });
    expect(probe.state.chips).toEqual({ a: 100, b: 100 });
    const probeBid = await api.submitBid(probe.session_id, 0);
    const engineFirstBid = probeBid.reveal.bid_b;

    // the real session, driven through the DOM
    document.body.innerHTML = '<div id="app"></div>';
    const root = document.getElementById("app")!;
    const app = new App(api, root);

    root.querySelector<HTMLInputElement>("#setup-chips")!.value = "200";
    root.querySelector<HTMLSelectElement>("#setup-side")!.value = "A";
    root.querySelector<HTMLInputElement>("#setup-seed")!.value = String(SEED);
    root.querySelector<HTMLButtonElement>("#new-game")!.click();
    await waitFor(() => app.state !== null && !app.busy);
    expect(app.state!.chips).toEqual({ a: 100, b: 100 });

    // turn 1: match the engine's bid; equal chips tie goes to the human (A)
    root.querySelector<HTMLInputElement>("#bid-input")!.value = String(engineFirstBid);
    root.querySelector<HTMLButtonElement>("#bid-submit")!.click();
    await waitFor(() => app.state!.turn === 1 && !app.busy);
    expect(app.lastReveal).toEqual({
      bid_a: engineFirstBid,
      bid_b: engineFirstBid,
      winner: "A",
      reason: "advantage",
    });
    expect(root.querySelector("#reveal-winner")!.textContent).toContain("won by advantage");

    let advantageReveals = 1;
    let guard = 0;
    while (app.state!.phase !== "finished") {
      expect(guard++).toBeLessThan(40);
      const state = app.state!;
      // the server conserves chips in every response
      expect(state.chips.a + state.chips.b).toBe(200);
      expect(root.querySelector("#chips-mine")!.textContent).toBe(
        `you: ${state.chips.a}`,
      );
      if (state.phase === "awaiting_bid") {
        const bid = Math.min(3, state.chips.a);
        const turnBefore = state.turn;
        root.querySelector<HTMLInputElement>("#bid-input")!.value = String(bid);
        root.querySelector<HTMLButtonElement>("#bid-submit")!.click();
        await waitFor(() => app.state!.turn === turnBefore + 1 && !app.busy);
        if (app.lastReveal!.reason === "advantage") advantageReveals += 1;
      } else {
        const before = app.state!;
        const legalCell = root.querySelector<HTMLButtonElement>(".cell.legal");
        if (legalCell && (before.must_move == null || before.must_move === "A")) {
          legalCell.click();
        } else {
          root.querySelector<HTMLButtonElement>("#designate-engine")!.click();
        }
        await waitFor(() => app.state !== before && !app.busy);
      }
    }

    expect(advantageReveals).toBeGreaterThanOrEqual(1);
    const finalState = app.state!;
    expect(finalState.chips.a + finalState.chips.b).toBe(200);
    expect(finalState.winner === "A" || finalState.winner === "B").toBe(true);

    // the displayed winner matches the server's record of the session
    const serverState = await api.getState(finalState.session_id);
    expect(serverState.phase).toBe("finished");
    expect(serverState.winner).toBe(finalState.winner);
    const banner = root.querySelector("#winner-banner")!;
    expect(banner.textContent).toContain(`(${serverState.winner})`);
  }, 300_000);
});
