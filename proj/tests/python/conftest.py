import json
import os
import pathlib
import shutil
import socket
import subprocess
import time
import urllib.error
import urllib.request

import pytest
from jsonschema import Draft202012Validator
from referencing import Registry, Resource

ROOT = pathlib.Path(__file__).resolve().parents[2]
SCHEMAS = pathlib.Path(os.environ.get("DOSEFIND_SCHEMAS", ROOT / "schemas"))

CRM_LOGISTIC = {
    "model": "logistic",
    "skeleton": [0.05, 0.12, 0.25, 0.40, 0.55],
    "target": 0.25,
    "a0": 3,
    "beta_mean": 0,
    "beta_sd": 1.34**0.5,
    "outcomes": "3N 5N 5T 3N 4N",
    "seed": 123,
}

CRM_PATHWAYS = {
    "model": "empiric",
    "skeleton": [0.05, 0.15, 0.25, 0.4, 0.6],
    "target": 0.25,
    "beta_sd": 1,
}

CAREFUL = {
    "name": "careful_escalation",
    "tox_threshold": 0.35,
    "certainty_threshold": 0.7,
    "reference_dose": 1,
}

EFFTOX = {
    "real_doses": [1, 2, 4, 6.6, 10],
    "efficacy_hurdle": 0.5,
    "toxicity_hurdle": 0.3,
    "p_e": 0.1,
    "p_t": 0.1,
    "eff0": 0.5,
    "tox1": 0.65,
    "eff_star": 0.7,
    "tox_star": 0.25,
    "alpha_mean": -7.9593,
    "alpha_sd": 3.5487,
    "beta_mean": 1.5482,
    "beta_sd": 3.5018,
    "gamma_mean": 0.7367,
    "gamma_sd": 2.5423,
    "zeta_mean": 3.4181,
    "zeta_sd": 2.4406,
    "eta_mean": 0,
    "eta_sd": 0.2,
    "psi_mean": 0,
    "psi_sd": 1,
}

QUICK = {"chains": 2, "warmup": 200, "draws_per_chain": 200}


@pytest.fixture(scope="session")
def validate():
    resources = {}
    for path in SCHEMAS.glob("*.json"):
        schema = json.loads(path.read_text())
        Draft202012Validator.check_schema(schema)
        resources[path.name] = Resource.from_contents(schema)
    registry = Registry().with_resources(
        [(name, r) for name, r in resources.items()]
        + [(r.contents["$id"], r) for r in resources.values()]
    )

    def check(name, instance):
        schema = resources[name + ".json"].contents
        Draft202012Validator(schema, registry=registry).validate(instance)
        return instance

    return check


@pytest.fixture(scope="session")
def cli():
    exe = os.environ.get("DOSEFIND_CLI") or shutil.which("dosefind")
    if not exe:
        candidate = ROOT / "build" / "dosefind"
        exe = str(candidate) if candidate.exists() else None
    if not exe:
        pytest.skip("dosefind executable not found")

    def run(*args, check=True):
        r = subprocess.run([exe, *map(str, args)], capture_output=True, text=True)
        if check and r.returncode != 0:
            raise AssertionError(f"exit {r.returncode}: {r.stderr}")
        return r

    run.exe = exe
    return run


class Client:
    def __init__(self, base):
        self.base = base

    def request(self, method, path, body=None):
        data = None if body is None else json.dumps(body).encode()
        req = urllib.request.Request(self.base + path, data=data, method=method)
        req.add_header("Content-Type", "application/json")
        try:
            with urllib.request.urlopen(req, timeout=120) as r:
                return r.status, r.read().decode()
        except urllib.error.HTTPError as e:
            return e.code, e.read().decode()

    def get(self, path):
        return self.request("GET", path)

    def post(self, path, body):
        return self.request("POST", path, body)


@pytest.fixture(scope="module")
def server(cli, tmp_path_factory):
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
    data_dir = tmp_path_factory.mktemp("sessions")
    proc = subprocess.Popen(
        [cli.exe, "serve", "--bind", f"127.0.0.1:{port}", "--data-dir", str(data_dir)],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.PIPE,
    )
    client = Client(f"http://127.0.0.1:{port}")
    client.data_dir = data_dir
    for _ in range(100):
        try:
            if client.get("/v1/health")[0] == 200:
                break
        except OSError:
            time.sleep(0.05)
    else:
        proc.kill()
        raise RuntimeError(proc.stderr.read().decode())
    yield client
    proc.terminate()
    proc.wait(timeout=10)
