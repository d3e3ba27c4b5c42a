"""Record HTTP tapes for the browser editor's contract tests.

Drives the real service through the scenarios the editor exercises and
freezes every request/response pair into frontend/tests/fixtures/. The
editor suite replays the tapes strictly, so it tests against genuine
server behavior without needing Python at test time.

Rerun after changing the server:

    python3 scripts/record_editor_fixtures.py
"""

import base64
import itertools
import json
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from fastapi.testclient import TestClient

from partext import tmserver
from partext.align import ParallelTexts, parallel_granularity
from partext.langtags import parse_tag
from partext.lingstore import LinguisticTable, save_table
from partext.medbox import MedDossier, pack
from partext.segcore import segment_text

EN = parse_tag("en")
ES = parse_tag("es")
FR = parse_tag("fr")

FIXTURES = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"

SOURCE = "Hello world. White cat. Good day."


def seeded_table() -> LinguisticTable:
    table = LinguisticTable(name="main")
    table.insert({EN: "hello world", ES: "Hola mundo"})
    table.insert({EN: "white cat", ES: "gato blanco"})
    table.insert({EN: "white cat", ES: "gata blanca"})
    table.insert({EN: "Hello world.", ES: "Hola mundo."})
    table.insert({EN: "White cat.", ES: "Gato blanco."})
    table.insert({EN: "White cat.", ES: "Gata blanca."})
    return table


def dossier_bytes() -> bytes:
    st = segment_text(SOURCE, EN)
    med = MedDossier(
        header={
            "id": "guide-1",
            "languages": "en, es, fr",
            "entirety.es": "undefined",
            "entirety.fr": "undefined",
        },
        parallel=ParallelTexts(
            versions={EN: st}, groups=(), granularity=parallel_granularity([st])
        ),
    )
    return pack(med)


class Recorder:
    """A TestClient wrapper that appends every exchange to a tape."""

    def __init__(self, client: TestClient):
        self.client = client
        self.entries: list[dict] = []

    def __call__(self, method: str, path: str, *, body: bytes | None = None,
                 payload: dict | None = None) -> dict | bytes:
        kwargs: dict = {}
        request: dict = {"method": method, "path": path}
        if body is not None:
            kwargs["content"] = body
            request["body"] = {"kind": "bytes", "base64": base64.b64encode(body).decode()}
        elif payload is not None:
            kwargs["json"] = payload
            request["body"] = {"kind": "json", "json": payload}
        else:
            request["body"] = None
        response = self.client.request(method, path, **kwargs)
        content_type = response.headers.get("content-type", "")
        if content_type.startswith("application/json"):
            result = response.json()
            recorded = {"kind": "json", "json": result}
        else:
            result = response.content
            recorded = {"kind": "bytes", "base64": base64.b64encode(result).decode()}
        self.entries.append(
            {
                "request": request,
                "response": {
                    "status": response.status_code,
                    "contentType": content_type,
                    "body": recorded,
                },
            }
        )
        return result


def fresh_client() -> TestClient:
    data_dir = Path(tempfile.mkdtemp(prefix="record-fixtures-"))
    save_table(seeded_table(), data_dir / "table")
    return TestClient(tmserver.create_app(data_dir))


def write_tape(name: str, recorder: Recorder, files: dict[str, bytes] | None = None) -> None:
    tape = {
        "name": name,
        "entries": recorder.entries,
    }
    if files:
        tape["files"] = {
            key: base64.b64encode(data).decode() for key, data in files.items()
        }
    FIXTURES.mkdir(parents=True, exist_ok=True)
    path = FIXTURES / f"{name}.json"
    path.write_text(json.dumps(tape, indent=2, ensure_ascii=False) + "\n")
    print(f"wrote {path.relative_to(Path.cwd())} ({len(recorder.entries)} exchanges)")


def open_session(record: Recorder, med: bytes, target: str = "es") -> str:
    opened = record("POST", f"/sessions?source=en&target={target}", body=med)
    session_id = opened["id"]
    record("GET", f"/sessions/{session_id}/segments")
    return session_id


def main() -> None:
    counter = itertools.count(1)
    tmserver._fresh_id = lambda: f"fixture-{next(counter):04d}"
    med = dossier_bytes()

    with fresh_client() as client:
        record = Recorder(client)
        open_session(record, med)
        write_tape("open-session", record, files={"dossier.med": med})

    with fresh_client() as client:
        record = Recorder(client)
        session_id = open_session(record, med)
        record(
            "PUT",
            f"/sessions/{session_id}/segments/1",
            payload={"state": "confirmed", "text": "Gato blanco.", "record_id": 5},
        )
        write_tape("accept-suggestion", record, files={"dossier.med": med})

    with fresh_client() as client:
        record = Recorder(client)
        session_id = open_session(record, med)
        record(
            "PUT",
            f"/sessions/{session_id}/segments/0",
            payload={"state": "confirmed", "text": "Hola mundo.", "record_id": 4},
        )
        record(
            "PUT",
            f"/sessions/{session_id}/segments/1",
            payload={"state": "draft", "text": "Gato"},
        )
        record(
            "PUT",
            f"/sessions/{session_id}/segments/2",
            payload={"state": "confirmed", "text": "Buenos días."},
        )
        record("POST", f"/sessions/{session_id}/complete")
        write_tape("complete-with-draft", record, files={"dossier.med": med})

    with fresh_client() as client:
        record = Recorder(client)
        record("POST", "/sessions?source=en&target=es", body=b"not an archive")
        write_tape(
            "invalid-dossier", record, files={"dossier.med": b"not an archive"}
        )

    with fresh_client() as client:
        record = Recorder(client)
        session_id = open_session(record, med)
        record(
            "POST",
            f"/sessions/{session_id}/segments/0/adjust",
            payload={"op": "split", "offset": 6},
        )
        write_tape("split-segment", record, files={"dossier.med": med})

    with fresh_client() as client:
        record = Recorder(client)
        session_id = open_session(record, med)
        peer_record = Recorder(client)  # the peer's own traffic stays off the tape
        peer_id = peer_record("POST", "/sessions?source=en&target=fr", body=med)["id"]
        peer_record(
            "PUT",
            f"/sessions/{peer_id}/segments/0",
            payload={"state": "confirmed", "text": "Bonjour le monde."},
        )
        peer_record(
            "PUT",
            f"/sessions/{peer_id}/segments/1",
            payload={"state": "draft", "text": "Chat"},
        )
        record("GET", f"/sessions/{session_id}/peer/fr")
        write_tape("peer-view", record, files={"dossier.med": med})


if __name__ == "__main__":
    main()
