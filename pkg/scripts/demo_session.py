"""Drive a complete translation session over the HTTP API, headlessly.

Seeds a data directory with a small table, submits a MED dossier,
confirms every segment (taking suggestions where the memory offers
them), completes the session, and lints the returned archive. Uses an
in-process test client, so no port is opened.
"""

import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from fastapi.testclient import TestClient

from partext.align import ParallelTexts, parallel_granularity
from partext.langtags import parse_tag
from partext.lingstore import LinguisticTable, load_table, save_table
from partext.medbox import MedDossier, pack, unpack, validate
from partext.segcore import segment_text
from partext.tmserver import create_app

EN = parse_tag("en")
ES = parse_tag("es")

FALLBACKS = {
    "Night falls.": "Cae la noche.",
    "Stars rise.": "Salen las estrellas.",
}


def main() -> None:
    data_dir = Path(tempfile.mkdtemp(prefix="partext-demo-"))
    table = LinguisticTable(name="main")
    table.insert({EN: "Night falls.", ES: "Cae la noche."})
    save_table(table, data_dir / "table")

    source = segment_text("Night falls. Stars rise.", EN)
    dossier = MedDossier(
        header={"id": "demo-session", "languages": "en, es", "entirety.es": "undefined"},
        parallel=ParallelTexts(
            versions={EN: source},
            groups=(),
            granularity=parallel_granularity([source]),
        ),
    )

    with TestClient(create_app(data_dir)) as client:
        opened = client.post(
            "/sessions", params={"source": "en", "target": "es"}, content=pack(dossier)
        )
        opened.raise_for_status()
        session_id = opened.json()["id"]
        print(f"session {session_id} opened against {data_dir}")

        views = client.get(f"/sessions/{session_id}/segments").json()["segments"]
        for index, view in enumerate(views):
            suggestions = view["suggestions"]
            if suggestions:
                best = suggestions[0]
                payload = {
                    "state": "confirmed",
                    "text": best["text"],
                    "record_id": best["record_id"],
                }
                origin = f"suggestion r{best['record_id']} ({best['score']:.2f})"
            else:
                payload = {"state": "confirmed", "text": FALLBACKS[view["source_text"]]}
                origin = "typed by hand"
            client.put(
                f"/sessions/{session_id}/segments/{index}", json=payload
            ).raise_for_status()
            print(
                f"  [{index}] {view['source_text']!r} -> {payload['text']!r}"
                f" ({origin})"
            )

        finished = client.post(f"/sessions/{session_id}/complete")
        finished.raise_for_status()
        archive = finished.content

    woven = unpack(archive)
    spanish = woven.parallel.versions[ES]
    print(f"woven [es] {spanish.source!r}")
    print(f"entirety: {woven.entirety_of(ES)}")
    print(f"lint findings: {validate(archive) or 'none'}")
    print(f"table grew to {len(load_table(data_dir / 'table'))} records")


if __name__ == "__main__":
    main()
