import pytest
from fastapi.testclient import TestClient

import helpers
from helpers import EN, ES, FR
from partext.align import Entirety, EntiretySet, ParallelTexts, align, parallel_granularity
from partext.lingstore import export_table, extract_tm, load_table, save_table
from partext.medbox import MedDossier, pack, unpack, validate
from partext.segcore import segment_text
from partext.tmserver import create_app

SOURCE = "Hello world. White cat. Good day."


def seeded_table():
    table = helpers.reference_table()
    table.insert({EN: "Hello world.", ES: "Hola mundo."})  # r4
    table.insert({EN: "White cat.", ES: "Gato blanco."})  # r5
    table.insert({EN: "White cat.", ES: "Gata blanca."})  # r6
    return table


@pytest.fixture
def data_dir(tmp_path):
    save_table(seeded_table(), tmp_path / "table")
    return tmp_path


@pytest.fixture
def client(data_dir):
    with TestClient(create_app(data_dir)) as c:
        yield c


def med_bytes(source=SOURCE, header=None):
    st = segment_text(source, EN)
    pt = ParallelTexts(
        versions={EN: st}, groups=(), granularity=parallel_granularity([st])
    )
    return pack(
        MedDossier(
            header=header
            or {"id": "guide-1", "languages": "en, es", "entirety.es": "undefined"},
            parallel=pt,
        )
    )


def bilingual_med_bytes():
    pt = align(
        {
            EN: segment_text("Hello world. White cat.", EN),
            FR: segment_text("Bonjour le monde. Chat blanc.", FR),
        }
    )
    return pack(
        MedDossier(
            header={"id": "guide-2", "languages": "en, fr, es", "entirety.es": "undefined"},
            parallel=pt,
        )
    )


def open_session(client, body=None, **params):
    query = {"source": "en", "target": "es", **params}
    response = client.post("/sessions", params=query, content=body or med_bytes())
    assert response.status_code == 201, response.text
    return response.json()["id"]


def segment_views(client, session_id):
    return client.get(f"/sessions/{session_id}/segments").json()["segments"]


def confirm(client, session_id, index, text, record_id=None):
    payload = {"state": "confirmed", "text": text}
    if record_id is not None:
        payload["record_id"] = record_id
    response = client.put(f"/sessions/{session_id}/segments/{index}", json=payload)
    assert response.status_code == 200, response.text
    return response.json()


class TestDocuments:
    def test_submission_reports_matches(self, client):
        response = client.post(
            "/documents", params={"lang": "en"}, content=SOURCE.encode("utf-8")
        )
        assert response.status_code == 201
        body = response.json()
        assert body["segments"] == 3
        assert body["matches"] == [[4], [5, 6], []]
        assert response.headers["Location"] == body["uri"]

    def test_memory_matches_direct_library_use(self, client):
        for threshold, fmt in ((1.0, "tmx"), (1.0, "csv"), (0.8, "tmx")):
            submitted = client.post(
                "/documents",
                params={"lang": "en", "threshold": threshold},
                content=SOURCE.encode("utf-8"),
            ).json()["id"]
            got = client.get(
                f"/documents/{submitted}", params={"langs": "en,es", "format": fmt}
            )
            assert got.status_code == 200
            memory = extract_tm(
                seeded_table(), segment_text(SOURCE, EN), [EN, ES], threshold=threshold
            )
            assert got.content == export_table(memory, [EN, ES], fmt).encode("utf-8")

    def test_default_languages_are_all_registered(self, client):
        submitted = client.post(
            "/documents", params={"lang": "en"}, content=b"White cat."
        ).json()["id"]
        got = client.get(f"/documents/{submitted}", params={"format": "csv"})
        assert got.text.splitlines()[0] == "id,en,es"

    def test_marked_text_submission(self, client):
        body = "#base table:db\n#lang es\n<<r1|Hola mundo>>"
        response = client.post(
            "/documents", params={"lang": "en"}, content=body.encode("utf-8")
        )
        assert response.status_code == 201
        assert response.json()["matches"] == [[1]]

    def test_rejects_bad_submissions(self, client):
        assert (
            client.post("/documents", params={"lang": "en"}, content=b"  ").status_code
            == 400
        )
        assert (
            client.post("/documents", params={"lang": "zz"}, content=b"x").status_code
            == 400
        )
        for threshold in (0.0, 1.5):
            response = client.post(
                "/documents", params={"lang": "en", "threshold": threshold}, content=b"x"
            )
            assert response.status_code == 400
        broken = "#base table:db\n#lang es\n<<r1|unclosed"
        assert (
            client.post(
                "/documents", params={"lang": "en"}, content=broken.encode("utf-8")
            ).status_code
            == 422
        )

    def test_rejects_bad_memory_requests(self, client):
        submitted = client.post(
            "/documents", params={"lang": "en"}, content=b"White cat."
        ).json()["id"]
        assert client.get("/documents/nope").status_code == 404
        assert (
            client.get(f"/documents/{submitted}", params={"format": "pdf"}).status_code
            == 400
        )
        response = client.get(f"/documents/{submitted}", params={"langs": "en,fr"})
        assert response.status_code == 400
        assert "fr" in response.json()["detail"]
        assert (
            client.get(f"/documents/{submitted}", params={"langs": " , "}).status_code
            == 400
        )


class TestRecords:
    def test_read_is_counted(self, client):
        first = client.get("/tables/db/records/r1")
        assert first.status_code == 200
        assert first.json()["value"]["reads"] == 1
        second = client.get("/tables/db/records/r1").json()
        assert second["value"]["reads"] == 2
        assert second["uri"] == "table:db/r1"
        assert second["segments"] == {"en": "hello world", "es": "Hola mundo"}

    def test_errors(self, client):
        assert client.get("/tables/db/records/x1").status_code == 400
        assert client.get("/tables/other/records/r1").status_code == 404
        assert client.get("/tables/db/records/r99").status_code == 404


class TestSessionLifecycle:
    def test_open_lists_segments_with_suggestions(self, client):
        session_id = open_session(client)
        views = segment_views(client, session_id)
        assert [v["source_text"] for v in views] == [
            "Hello world.",
            "White cat.",
            "Good day.",
        ]
        assert all(v["state"] == "untouched" for v in views)
        assert views[1]["suggestions"] == [
            {"record_id": 5, "text": "Gato blanco.", "score": 1.0},
            {"record_id": 6, "text": "Gata blanca.", "score": 1.0},
        ]
        assert views[2]["suggestions"] == []

    def test_open_rejections(self, client):
        ok = med_bytes()
        assert (
            client.post(
                "/sessions", params={"source": "en", "target": "en"}, content=ok
            ).status_code
            == 400
        )
        assert (
            client.post(
                "/sessions", params={"source": "en", "target": "fr"}, content=ok
            ).status_code
            == 400
        )
        assert (
            client.post(
                "/sessions", params={"source": "es", "target": "en"}, content=ok
            ).status_code
            == 400
        )
        broken = client.post(
            "/sessions", params={"source": "en", "target": "es"}, content=b"not a zip"
        )
        assert broken.status_code == 400
        assert "diagnostics" in broken.json()["detail"]

    def test_listing_and_active_filter(self, client):
        session_id = open_session(client)
        listed = client.get("/sessions").json()["sessions"]
        assert [s["id"] for s in listed] == [session_id]
        assert listed[0]["segments"] == 3 and listed[0]["confirmed"] == 0

        for index, text in enumerate(["Hola mundo.", "Gato blanco.", "Buenos."]):
            confirm(client, session_id, index, text)
        client.post(f"/sessions/{session_id}/complete")
        assert client.get("/sessions").json()["sessions"][0]["completed"] is True
        assert client.get("/sessions", params={"active": True}).json()["sessions"] == []

    def test_draft_then_confirm(self, client):
        session_id = open_session(client)
        view = client.put(
            f"/sessions/{session_id}/segments/0",
            json={"state": "draft", "text": "Hola"},
        ).json()
        assert view["state"] == "draft" and view["text"] == "Hola"
        view = confirm(client, session_id, 0, "Hola mundo.", record_id=4)
        assert view["state"] == "confirmed" and view["record_id"] == 4

    def test_accepting_a_record_counts_as_use(self, client, data_dir):
        session_id = open_session(client)
        confirm(client, session_id, 1, "Gato blanco.", record_id=5)
        assert load_table(data_dir / "table").require(5).value.uses == 1

    def test_clearing_record_id(self, client):
        session_id = open_session(client)
        confirm(client, session_id, 0, "Hola mundo.", record_id=4)
        view = client.put(
            f"/sessions/{session_id}/segments/0",
            json={"state": "confirmed", "text": "Hola mundo."},
        ).json()
        assert view["record_id"] is None

    def test_put_rejections(self, client):
        session_id = open_session(client)
        url = f"/sessions/{session_id}/segments"
        assert client.put(f"{url}/9", json={"state": "draft"}).status_code == 404
        assert client.put(f"{url}/0", json={"state": "done"}).status_code == 400
        assert (
            client.put(f"{url}/0", json={"state": "confirmed", "text": " "}).status_code
            == 400
        )
        assert (
            client.put(
                f"{url}/0", json={"state": "draft", "text": "x", "record_id": 99}
            ).status_code
            == 400
        )
        assert client.get("/sessions/nope/segments").status_code == 404


class TestAdjust:
    def test_split_then_merge_round_trip(self, client):
        session_id = open_session(client)
        split = client.post(
            f"/sessions/{session_id}/segments/0/adjust",
            json={"op": "split", "offset": 6},
        )
        assert split.status_code == 200
        assert [s["source_text"] for s in split.json()["segments"]] == [
            "Hello ",
            "world.",
            "White cat.",
            "Good day.",
        ]
        merged = client.post(
            f"/sessions/{session_id}/segments/0/adjust", json={"op": "merge"}
        )
        assert [s["source_text"] for s in merged.json()["segments"]] == [
            "Hello world.",
            "White cat.",
            "Good day.",
        ]

    def test_split_keeps_other_segments_work(self, client):
        session_id = open_session(client)
        client.put(
            f"/sessions/{session_id}/segments/1",
            json={"state": "draft", "text": "Gato blanco."},
        )
        views = client.post(
            f"/sessions/{session_id}/segments/0/adjust",
            json={"op": "split", "offset": 6},
        ).json()["segments"]
        assert views[2]["state"] == "draft" and views[2]["text"] == "Gato blanco."
        assert views[0]["state"] == "untouched" and views[1]["state"] == "untouched"

    def test_split_offsets_count_characters(self, client):
        body = med_bytes(source="Agua fría. Más tarde.")
        session_id = open_session(client, body=body)
        views = client.post(
            f"/sessions/{session_id}/segments/0/adjust",
            json={"op": "split", "offset": 5},
        ).json()["segments"]
        assert views[0]["source_text"] == "Agua "
        assert views[1]["source_text"] == "fría."

    def test_merge_joins_neighbouring_sentences(self, client):
        session_id = open_session(client)
        views = client.post(
            f"/sessions/{session_id}/segments/0/adjust", json={"op": "merge"}
        ).json()["segments"]
        assert views[0]["source_text"] == "Hello world. White cat."
        assert views[0]["state"] == "untouched"
        assert len(views) == 2

    def test_rejections(self, client):
        session_id = open_session(client)
        url = f"/sessions/{session_id}/segments"
        assert client.post(f"{url}/0/adjust", json={"op": "chop"}).status_code == 400
        assert client.post(f"{url}/0/adjust", json={"op": "split"}).status_code == 400
        assert (
            client.post(
                f"{url}/0/adjust", json={"op": "split", "offset": True}
            ).status_code
            == 400
        )
        for offset in (0, len("Hello world.")):
            assert (
                client.post(
                    f"{url}/0/adjust", json={"op": "split", "offset": offset}
                ).status_code
                == 400
            )
        assert client.post(f"{url}/2/adjust", json={"op": "merge"}).status_code == 400
        assert client.post(f"{url}/9/adjust", json={"op": "merge"}).status_code == 404
        assert (
            client.post("/sessions/nope/segments/0/adjust", json={"op": "merge"}).status_code
            == 404
        )


class TestPeers:
    def test_only_confirmed_work_is_visible(self, client):
        mine = open_session(client)
        theirs = open_session(client)
        confirm(client, theirs, 0, "Hola mundo.")
        client.put(
            f"/sessions/{theirs}/segments/1",
            json={"state": "draft", "text": "secret draft"},
        )
        peers = client.get(f"/sessions/{mine}/peer/es").json()["peers"]
        assert len(peers) == 1
        assert peers[0]["session"] == theirs
        assert peers[0]["completed"] is False
        assert peers[0]["segments"] == [{"index": 0, "text": "Hola mundo."}]

    def test_other_languages_and_dossiers_excluded(self, client):
        mine = open_session(client)
        other_dossier = open_session(
            client,
            body=med_bytes(
                header={"id": "other", "languages": "en, es", "entirety.es": "undefined"}
            ),
        )
        confirm(client, other_dossier, 0, "Hola mundo.")
        assert client.get(f"/sessions/{mine}/peer/es").json()["peers"] == []
        assert client.get(f"/sessions/{mine}/peer/fr").json()["peers"] == []
        assert client.get(f"/sessions/{mine}/peer/zz").status_code == 400


class TestComplete:
    def finish(self, client, session_id, texts=("Hola mundo.", "Gato blanco.", "Buenos días.")):
        for index, text in enumerate(texts):
            confirm(client, session_id, index, text)
        response = client.post(f"/sessions/{session_id}/complete")
        assert response.status_code == 200
        return response.content

    def test_weaves_a_complete_target_version(self, client, data_dir):
        session_id = open_session(client)
        data = self.finish(client, session_id)
        med = unpack(data)
        assert validate(data) == []
        assert med.entirety_of(ES) == EntiretySet.of(Entirety.COMPLETE)
        assert med.parallel.versions[ES].source == "Hola mundo. Gato blanco. Buenos días."
        assert med.parallel.versions[EN].source == SOURCE
        assert "entirety.es" not in med.header
        assert len(med.parallel.groups) == 3

    def test_confirmed_pairs_grow_the_database(self, client, data_dir):
        before = len(load_table(data_dir / "table"))
        session_id = open_session(client)
        self.finish(client, session_id)
        table = load_table(data_dir / "table")
        assert len(table) == before + 1
        added = table.lookup_exact(EN, "Good day.")
        assert added and added[0].segments[ES] == "Buenos días."

    def test_idempotent(self, client):
        session_id = open_session(client)
        first = self.finish(client, session_id)
        second = client.post(f"/sessions/{session_id}/complete")
        assert second.content == first
        assert (
            client.put(
                f"/sessions/{session_id}/segments/0",
                json={"state": "draft", "text": "x"},
            ).status_code
            == 409
        )
        assert (
            client.post(
                f"/sessions/{session_id}/segments/0/adjust", json={"op": "merge"}
            ).status_code
            == 409
        )

    def test_draft_leaves_the_version_translating(self, client, data_dir):
        before = len(load_table(data_dir / "table"))
        session_id = open_session(client)
        confirm(client, session_id, 0, "Hola mundo.")
        confirm(client, session_id, 1, "Gato blanco.")
        client.put(
            f"/sessions/{session_id}/segments/2",
            json={"state": "draft", "text": "Buenos"},
        )
        data = client.post(f"/sessions/{session_id}/complete").content
        med = unpack(data)
        assert med.entirety_of(ES) == EntiretySet.of(Entirety.TRANSLATING)
        assert med.parallel.versions[ES].source == "Hola mundo. Gato blanco. Buenos"
        assert len(load_table(data_dir / "table")) == before

    def test_untouched_segment_becomes_a_broken_line(self, client):
        session_id = open_session(client)
        confirm(client, session_id, 0, "Hola mundo.")
        confirm(client, session_id, 1, "Gato blanco.")
        med = unpack(client.post(f"/sessions/{session_id}/complete").content)
        assert med.entirety_of(ES) == EntiretySet.of(Entirety.TRANSLATING)
        assert med.parallel.versions[ES].source == "Hola mundo. Gato blanco. "
        assert len(med.parallel.groups) == 2

    def test_existing_alignments_gain_the_target(self, client):
        session_id = open_session(client, body=bilingual_med_bytes())
        confirm(client, session_id, 0, "Hola mundo.")
        confirm(client, session_id, 1, "Gato blanco.")
        med = unpack(client.post(f"/sessions/{session_id}/complete").content)
        assert set(med.parallel.versions) == {EN, ES, FR}
        assert len(med.parallel.groups) == 2
        for group in med.parallel.groups:
            assert set(group.member_map) == {EN, ES, FR}

    def test_merged_source_drops_stale_alignments(self, client):
        session_id = open_session(client, body=bilingual_med_bytes())
        client.post(f"/sessions/{session_id}/segments/0/adjust", json={"op": "merge"})
        confirm(client, session_id, 0, "Hola mundo. Gato blanco.")
        med = unpack(client.post(f"/sessions/{session_id}/complete").content)
        assert len(med.parallel.groups) == 1
        assert set(med.parallel.groups[0].member_map) == {EN, ES}
        assert med.parallel.versions[EN].source == "Hello world. White cat."
        assert med.parallel.versions[FR].source == "Bonjour le monde. Chat blanc."


class TestPersistence:
    def test_state_survives_a_restart(self, data_dir):
        with TestClient(create_app(data_dir)) as first:
            session_id = open_session(first)
            first.put(
                f"/sessions/{session_id}/segments/0",
                json={"state": "draft", "text": "Hola"},
            )
            submitted = first.post(
                "/documents", params={"lang": "en"}, content=b"White cat."
            ).json()["id"]
            first.get("/tables/db/records/r1")

        with TestClient(create_app(data_dir)) as second:
            views = segment_views(second, session_id)
            assert views[0]["state"] == "draft" and views[0]["text"] == "Hola"
            memory = second.get(f"/documents/{submitted}", params={"format": "csv"})
            assert memory.status_code == 200
            assert second.get("/tables/db/records/r1").json()["value"]["reads"] == 2

    def test_completion_is_stable_across_restarts(self, data_dir):
        with TestClient(create_app(data_dir)) as first:
            session_id = open_session(first)
            for index, text in enumerate(["Hola mundo.", "Gato blanco.", "Buenos."]):
                confirm(first, session_id, index, text)
            data = first.post(f"/sessions/{session_id}/complete").content

        with TestClient(create_app(data_dir)) as second:
            assert second.post(f"/sessions/{session_id}/complete").content == data
