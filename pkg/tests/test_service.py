import base64
import io
import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from cropkit.cli import main
from cropkit.geometry import CropBox, Dims
from cropkit.heatmaps import save_heatmap, synth_planted
from cropkit.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def _heatmap_b64(tmp_path, name="h.csv", dims=Dims(64, 64), planted=CropBox(8, 8, 32, 32)):
    heatmap = synth_planted(dims, planted, 0.05, seed=1)
    path = tmp_path / name
    save_heatmap(heatmap, path)
    return base64.b64encode(path.read_bytes()).decode(), path


def test_aspect_string_accepted(client, tmp_path):
    from cropkit.geometry import CropBox as Box
    from cropkit.geometry import satisfies_aspect

    b64, _ = _heatmap_b64(tmp_path)
    resp = client.post("/v1/crop", json={
        "heatmap_b64": b64, "width": 64, "height": 64, "aspect": "16:9",
        "iterations": 150, "step_granularity": 1, "seed": 0,
    })
    assert resp.status_code == 200
    box = resp.json()["box"]
    assert satisfies_aspect(Box(box["x"], box["y"], box["w"], box["h"]), 16 / 9)
    assert box["w"] > 16  # found the planted mass, not a degenerate corner
    bad = client.post("/v1/crop", json={
        "heatmap_b64": b64, "width": 64, "height": 64, "aspect": "-3",
    })
    assert bad.status_code == 400


def test_health(client):
    resp = client.get("/v1/health")
    assert resp.status_code == 200
    assert resp.text == "ok"


def test_crop_round_trip(client, tmp_path):
    b64, _ = _heatmap_b64(tmp_path)
    payload = {
        "heatmap_b64": b64,
        "width": 64,
        "height": 64,
        "aspect": 1.0,
        "layout": [{"x": 10, "y": 10, "w": 20, "h": 20}],
        "method": "heatmap",
        "iterations": 150,
        "step_granularity": 1,
        "seed": 5,
    }
    resp = client.post("/v1/crop", json=payload)
    assert resp.status_code == 200
    body = resp.json()
    assert body["recall"] == 1.0
    assert body["box"]["w"] == body["box"]["h"]
    again = client.post("/v1/crop", json=payload).json()
    assert again["box"] == body["box"]
    assert again["breakdown"] == body["breakdown"]


def test_client_payload_with_exclusion_weight(client, tmp_path):
    # mirrors the web client's buildCropPayload output exactly
    b64, _ = _heatmap_b64(tmp_path)
    resp = client.post("/v1/crop", json={
        "heatmap_b64": b64,
        "width": 64,
        "height": 64,
        "aspect": 1.0,
        "layout": [
            {"x": 10, "y": 10, "w": 16, "h": 16, "weight": 1},
            {"x": 48, "y": 48, "w": 12, "h": 12, "weight": -1},
        ],
        "method": "heatmap",
        "iterations": 120,
        "alpha": 10000,
        "seed": 3,
    })
    assert resp.status_code == 200
    body = resp.json()
    assert body["recall"] == 1.0
    # the avoided corner stays out of the crop
    box = body["box"]
    assert not (box["x"] <= 48 and box["x"] + box["w"] >= 60
                and box["y"] <= 48 and box["y"] + box["h"] >= 60)


def test_layout_outside_dims_is_400(client, tmp_path):
    b64, _ = _heatmap_b64(tmp_path)
    resp = client.post("/v1/crop", json={
        "heatmap_b64": b64, "width": 64, "height": 64, "aspect": 1.0,
        "layout": [{"x": 60, "y": 60, "w": 20, "h": 20}],
    })
    assert resp.status_code == 400


def test_malformed_payload_is_400(client):
    resp = client.post("/v1/crop", json={"width": 64})
    assert resp.status_code == 400
    resp = client.post("/v1/crop", json={
        "width": 64, "height": 64, "aspect": 1.0,
    })
    assert resp.status_code == 400  # no heatmap source


def test_infeasible_constraints_is_422(client, tmp_path):
    b64, _ = _heatmap_b64(tmp_path)
    resp = client.post("/v1/crop", json={
        "heatmap_b64": b64, "width": 64, "height": 64, "aspect": 1.0,
        "method": "proposal",  # smallest proposal is 168x168, image is 64x64
    })
    assert resp.status_code == 422


def test_oversized_upload_is_413(client):
    blob = base64.b64encode(b"x" * (17 * 1024 * 1024)).decode()
    resp = client.post("/v1/crop", json={
        "heatmap_b64": blob, "width": 64, "height": 64, "aspect": 1.0,
    })
    assert resp.status_code == 413


def test_big_heatmap_resampled_for_scoring(client):
    values = np.zeros((400, 300), dtype=np.uint8)
    values[100:300, 80:220] = 255
    from PIL import Image

    buf = io.BytesIO()
    Image.fromarray(values, mode="L").save(buf, format="PNG")
    resp = client.post("/v1/crop", json={
        "heatmap_b64": base64.b64encode(buf.getvalue()).decode(),
        "width": 300, "height": 400, "aspect": 0.75,
        "iterations": 50, "seed": 1,
    })
    assert resp.status_code == 200


def test_heatmap_endpoint_returns_png(client):
    from PIL import Image

    arr = np.zeros((48, 48), dtype=np.uint8)
    arr[16:32, 16:32] = 255
    buf = io.BytesIO()
    Image.fromarray(arr, mode="L").save(buf, format="PNG")
    resp = client.post(
        "/v1/heatmap",
        files={"file": ("img.png", buf.getvalue(), "image/png")},
    )
    assert resp.status_code == 200
    assert resp.headers["content-type"] == "image/png"
    with Image.open(io.BytesIO(resp.content)) as out:
        assert out.size == (64, 64)


def test_heatmap_endpoint_rejects_garbage(client):
    resp = client.post("/v1/heatmap", files={"file": ("x.png", b"not an image", "image/png")})
    assert resp.status_code == 400


def test_trace_included_on_request(client, tmp_path):
    b64, _ = _heatmap_b64(tmp_path)
    resp = client.post("/v1/crop", json={
        "heatmap_b64": b64, "width": 64, "height": 64, "aspect": 1.0,
        "iterations": 7, "seed": 2, "include_trace": True,
    })
    assert resp.status_code == 200
    assert len(resp.json()["trace"]) == 7


def test_cli_and_service_agree(client, tmp_path, capsys):
    b64, path = _heatmap_b64(tmp_path)
    service = client.post("/v1/crop", json={
        "heatmap_b64": b64, "width": 64, "height": 64, "aspect": 1.0,
        "layout": [{"x": 10, "y": 10, "w": 20, "h": 20}],
        "method": "heatmap", "iterations": 80, "step_granularity": 1, "seed": 9,
    }).json()
    code = main([
        "crop", "--heatmap", str(path), "--aspect", "1.0",
        "--layout", "10,10,20,20", "--method", "heatmap",
        "--iterations", "80", "--step-granularity", "1", "--seed", "9",
    ])
    assert code == 0
    cli_resp = json.loads(capsys.readouterr().out)
    assert cli_resp["box"] == service["box"]
    assert cli_resp["breakdown"] == pytest.approx(service["breakdown"])
    assert cli_resp["recall"] == service["recall"]


def test_static_dir_served(tmp_path):
    (tmp_path / "index.html").write_text("<html><body>crop client</body></html>")
    app = create_app(static_dir=str(tmp_path))
    client = TestClient(app)
    resp = client.get("/")
    assert resp.status_code == 200
    assert "crop client" in resp.text
