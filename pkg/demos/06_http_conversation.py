#!/usr/bin/env python3
"""A two-turn slot-filling conversation against the HTTP service, run
in-process (no sockets).  The client accumulates bindings: the server is
stateless."""

import json
import shutil
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from apisynth import load_kg, save_kg
from apisynth.fixtures import DEMO_GRAPH, DEMO_VECTORS, fixture_path
from apisynth.service import ServiceConfig, create_app

workdir = Path(tempfile.mkdtemp(prefix="apisynth-demo-"))
graph = load_kg(fixture_path(DEMO_GRAPH))
# make the location parameter unbindable so the bot has to ask for it
graph.declaration("yelp.search").parameter("location").values.clear()
(workdir / "graph.json").write_bytes(save_kg(graph))

config = ServiceConfig(
    graph_path=str(workdir / "graph.json"),
    embeddings_path=str(fixture_path(DEMO_VECTORS)),
)
client = TestClient(create_app(config))

expression = "Is there any Chinese restaurant near Sydney Opera House"
bindings = {}

print(f"user: {expression}")
first = client.post(
    "/synthesize", json={"expression": expression, "bindings": bindings}
).json()
print(f"bot:  [{first['status']}] {first['questions'][0]}")

bindings["location"] = "sydney opera house"
print(f"user: {bindings['location']}")
second = client.post(
    "/synthesize", json={"expression": expression, "bindings": bindings}
).json()
print(f"bot:  [{second['status']}] here is the call I would make:")
print(f"      {second['call']['method']} {second['call']['url']}")

print("\nfull response payload of the final turn:")
print(json.dumps(second, indent=2))

shutil.rmtree(workdir)
