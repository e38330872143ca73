"""Drive the task service over real HTTP with a scripted worker.

Starts the service in a background thread, then plays a worker who answers
by the ground truth: fetch a task, post yes or no, repeat until the queue
drains. The status endpoint shows quality climbing as answers arrive.
"""

import json
import threading
import time
import urllib.request

import uvicorn

from crowdpath import DisciplineConfig, Engine, GroundTruth, full_pairs
from crowdpath.service import build_app

TRUTH = GroundTruth({
    "ada": "e1", "ade": "e1", "adi": "e1",
    "bob": "e2", "bop": "e2",
    "cyd": "e3", "cyn": "e3", "cyr": "e3",
})


def start_server(app):
    config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    while not server.started:
        time.sleep(0.02)
    port = server.servers[0].sockets[0].getsockname()[1]
    return server, f"http://127.0.0.1:{port}"


def get(base, path):
    with urllib.request.urlopen(base + path) as response:
        if response.status == 204:
            return None
        return json.loads(response.read())


def post(base, path, body):
    request = urllib.request.Request(
        base + path,
        data=json.dumps(body).encode(),
        headers={"Content-Type": "application/json"},
        method="POST",
    )
    with urllib.request.urlopen(request) as response:
        return json.loads(response.read())


def main():
    engine = Engine(
        TRUTH.records,
        truth=TRUTH,
        discipline=DisciplineConfig(mode="feer", quorum=2, edge_budget=6),
        seed=3,
        universe=full_pairs(TRUTH.records),
    )
    server, base = start_server(build_app(engine, max_outstanding=2))
    print(f"service up at {base}")
    try:
        answered = 0
        while True:
            task = get(base, "/task")
            if task is None:
                break
            a, b = task["pair"]
            verdict = "yes" if TRUTH.same(a, b) else "no"
            post(base, "/answer", {
                "task_id": task["task_id"], "answer": verdict, "worker_id": "demo",
            })
            answered += 1
            if answered % 10 == 0:
                status = get(base, "/status")
                print(f"  after {status['cost']:>3} answers: "
                      f"f={status['f']:.3f} clusters={status['clusters']}")
        status = get(base, "/status")
        print(f"queue drained after {status['cost']} answers, f={status['f']:.3f}")
        print("final clusters:")
        for cluster in sorted(engine.clustering.as_sets(), key=lambda c: sorted(c)[0]):
            print(f"  {sorted(cluster)}")
    finally:
        server.should_exit = True
    assert status["f"] == 1.0


if __name__ == "__main__":
    main()
