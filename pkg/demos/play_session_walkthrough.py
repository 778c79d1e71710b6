"""A scripted session against the engine over the HTTP API.

Uses the in-process test client, so no server needs to be running; the
same requests work against ``bidsolve serve``.  The human plays A in a
small race game and follows a simple rule of thumb: bid one chip, and
when winning a move, take it.
"""

from fastapi.testclient import TestClient

from bidsolve.api_server import create_app

app = create_app(game="race:2,2", chips_total=6, x=1e-6)
client = TestClient(app)

r = client.post(
    "/v1/games",
    json={"game": "race:2,2", "chips_total": 6, "human_player": "A", "seed": 2024},
)
session = r.json()
sid = session["session_id"]
state = session["state"]
print(f"session {sid[:8]}...  chips {state['chips']}  you play {state['human']}\n")

while state["phase"] != "finished":
    if state["phase"] == "awaiting_bid":
        hint = client.get(f"/v1/games/{sid}/hint").json()
        my_chips = state["chips"]["a"]
        bid = min(1, my_chips)
        body = client.post(f"/v1/games/{sid}/bids", json={"bid": bid}).json()
        reveal = body["reveal"]
        print(
            f"turn {body['state']['turn']}: you bid {reveal['bid_a']}, "
            f"engine bid {reveal['bid_b']} -> {reveal['winner']} wins "
            f"({reveal['reason']}); chips now {body['state']['chips']}"
            f"   [hint said: {['%.2f' % p for p in hint['strategy']]}, "
            f"value {hint['value']}]"
        )
        state = body["state"]
    else:
        if state["legal_moves"] and state["must_move"] in (None, state["human"]):
            move = state["legal_moves"][0]
            body = client.post(
                f"/v1/games/{sid}/moves",
                json={"designate": state["human"], "move": move},
            ).json()
            print(f"         you move to {body['state']['vertex']}")
        else:
            body = client.post(
                f"/v1/games/{sid}/moves", json={"designate": state["engine"]}
            ).json()
            print(f"         engine is forced to move: {body['state']['vertex']}")
        state = body["state"]

print(f"\nfinished: {state['winner']} wins after {state['turn']} bidding rounds")
