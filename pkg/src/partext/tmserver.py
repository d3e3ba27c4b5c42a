"""HTTP service around one linguistic database.

Documents are submitted once and referenced by URI afterwards; the
server stores the matching record ids per segment, not generated files,
and materializes translation memories on request in TMX or CSV.  On top
of the same database sits a small CAT session API: upload a dossier,
translate it segment by segment, peek at peer sessions' confirmed work,
and download the completed dossier with the target version woven in.

State lives under a data directory (``PARTEXT_DATA_DIR``) and survives
restarts.  Database writes are serialized behind one lock; reads serve
snapshots.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
import uuid
from dataclasses import replace
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request, Response

from . import jsonio
from .align import (
    AlignmentGroup,
    Entirety,
    EntiretySet,
    ParallelTexts,
)
from .langtags import LanguageTag, parse_tag
from .align import parallel_granularity
from .lingstore import (
    LinguisticTable,
    base_uri,
    bump_value,
    export_table,
    harvest,
    load_table,
    parse_marked_text,
    record_uri,
    save_table,
)
from .medbox import MedDossier, MissingHeader, NotAZip, pack, unpack, validate
from .segcore import (
    InvalidEdit,
    MergeWithNext,
    Piece,
    Segment,
    SegmentKind,
    SegmentedText,
    SplitSegment,
    apply_manual_edit,
    assemble_pieces,
    segment_text,
)

__all__ = ["create_app", "serve"]

DEFAULT_TABLE_NAME = "main"


def _fresh_id() -> str:
    return uuid.uuid4().hex[:12]


class _State:
    """Everything the endpoints share, mirrored to the data directory."""

    def __init__(self, data_dir: Path):
        self.data_dir = data_dir
        self.lock = threading.RLock()
        self.table_dir = data_dir / "table"
        self.submission_dir = data_dir / "submissions"
        self.session_dir = data_dir / "sessions"
        for directory in (self.submission_dir, self.session_dir):
            directory.mkdir(parents=True, exist_ok=True)
        if (self.table_dir / "manifest.json").is_file():
            self.database = load_table(self.table_dir)
        else:
            self.database = LinguisticTable(name=DEFAULT_TABLE_NAME)
            save_table(self.database, self.table_dir)
        self.submissions: dict[str, dict] = {}
        self.sessions: dict[str, dict] = {}
        for path in sorted(self.submission_dir.glob("*.json")):
            self.submissions[path.stem] = json.loads(path.read_text(encoding="utf-8"))
        for path in sorted(self.session_dir.glob("*.json")):
            self.sessions[path.stem] = json.loads(path.read_text(encoding="utf-8"))

    def save_database(self) -> None:
        save_table(self.database, self.table_dir)

    def save_submission(self, submission_id: str) -> None:
        path = self.submission_dir / f"{submission_id}.json"
        path.write_text(
            json.dumps(self.submissions[submission_id], ensure_ascii=False), encoding="utf-8"
        )

    def save_session(self, session_id: str) -> None:
        path = self.session_dir / f"{session_id}.json"
        path.write_text(
            json.dumps(self.sessions[session_id], ensure_ascii=False), encoding="utf-8"
        )

    def med_path(self, session_id: str, completed: bool = False) -> Path:
        suffix = "completed.med" if completed else "med"
        return self.session_dir / f"{session_id}.{suffix}"


def _parse_lang_or_400(code: str) -> LanguageTag:
    try:
        return parse_tag(code)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


def _parse_langs_or_400(raw: str) -> list[LanguageTag]:
    parts = [part.strip() for part in raw.split(",") if part.strip()]
    if not parts:
        raise HTTPException(status_code=400, detail="no languages requested")
    return [_parse_lang_or_400(part) for part in parts]


def _content_leaf_paths(st: SegmentedText) -> list[tuple[int, ...]]:
    return [
        path
        for path in st.leaf_paths()
        if st.text_of(st.resolve(path)).strip()
    ]


def _all_nodes(root: Segment):
    """Yield (path, segment) for every node of the tree, root included."""
    stack: list[tuple[tuple[int, ...], Segment]] = [((), root)]
    while stack:
        path, node = stack.pop()
        yield path, node
        for i, child in enumerate(node.children):
            stack.append((path + (i,), child))


def create_app(data_dir: str | Path | None = None) -> FastAPI:
    """Build the application; state lives under ``data_dir``.

    Falls back to ``PARTEXT_DATA_DIR``, then to a throwaway directory
    (useful for tests and demos, not for production data).
    """
    if data_dir is None:
        data_dir = os.environ.get("PARTEXT_DATA_DIR")
    if data_dir is None:
        data_dir = tempfile.mkdtemp(prefix="partext-")
    state = _State(Path(data_dir))

    app = FastAPI(title="partext translation memory service")
    app.state.partext = state

    # -- documents ----------------------------------------------------

    @app.post("/documents", status_code=201)
    async def submit_document(request: Request, lang: str, threshold: float = 1.0):
        body = (await request.body()).decode("utf-8")
        if not body.strip():
            raise HTTPException(status_code=400, detail="empty document")
        language = _parse_lang_or_400(lang)
        if not 0.0 < threshold <= 1.0:
            raise HTTPException(status_code=400, detail="threshold must be in (0, 1]")
        try:
            if body.startswith("#base "):
                document = parse_marked_text(body)
            else:
                document = segment_text(body, language)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=f"segmentation failed: {exc}") from exc

        with state.lock:
            matches: list[list[int]] = []
            for path in _content_leaf_paths(document):
                text = document.text_of(document.resolve(path))
                if threshold >= 1.0:
                    ids = [r.id for r in state.database.lookup_exact(document.language, text)]
                else:
                    ids = [
                        m.record_id
                        for m in state.database.lookup_fuzzy(document.language, text, threshold)
                    ]
                matches.append(ids)
            submission_id = _fresh_id()
            state.submissions[submission_id] = {
                "id": submission_id,
                "language": document.language.code,
                "threshold": threshold,
                "document": jsonio.st_to_dict(document),
                "matches": matches,
            }
            state.save_submission(submission_id)

        uri = f"/documents/{submission_id}"
        return Response(
            content=json.dumps(
                {"uri": uri, "id": submission_id, "segments": len(matches), "matches": matches}
            ),
            status_code=201,
            media_type="application/json",
            headers={"Location": uri},
        )

    @app.get("/documents/{submission_id}")
    async def get_document_tm(submission_id: str, langs: str | None = None, format: str = "tmx"):
        submission = state.submissions.get(submission_id)
        if submission is None:
            raise HTTPException(status_code=404, detail="unknown submission")
        if format not in ("tmx", "csv"):
            raise HTTPException(status_code=400, detail=f"unknown format {format!r}")
        with state.lock:
            registered = set(state.database.languages())
            if langs is None:
                targets = sorted(registered, key=lambda l: l.code)
            else:
                targets = _parse_langs_or_400(langs)
                unregistered = [l.code for l in targets if l not in registered]
                if unregistered:
                    raise HTTPException(
                        status_code=400,
                        detail="not registered in the database: " + ", ".join(unregistered),
                    )
            memory = LinguisticTable(name=f"{state.database.name}.tm")
            target_set = set(targets)
            for ids in submission["matches"]:
                for record_id in ids:
                    record = state.database.get(record_id)
                    if record and any(l in record.segments for l in target_set):
                        memory.adopt(record, source_table=state.database.name)
            body = export_table(memory, targets, format)
        media = "application/xml" if format == "tmx" else "text/csv"
        return Response(content=body, media_type=media)

    # -- records ------------------------------------------------------

    @app.get("/tables/{name}/records/{rid}")
    async def get_record(name: str, rid: str):
        if not (rid.startswith("r") and rid[1:].isdigit()):
            raise HTTPException(status_code=400, detail=f"malformed record id {rid!r}")
        if name != state.database.name:
            raise HTTPException(status_code=404, detail=f"unknown table {name!r}")
        with state.lock:
            record = state.database.get(int(rid[1:]))
            if record is None:
                raise HTTPException(status_code=404, detail=f"no record {rid}")
            value = bump_value(state.database, record.id, "read")
            state.save_database()
            return {
                "id": record.id,
                "uri": record_uri(base_uri(state.database), record.id),
                "segments": {lang.code: text for lang, text in sorted(
                    record.segments.items(), key=lambda kv: kv[0].code)},
                "domain": record.domain,
                "source_link": record.source_link,
                "value": {
                    "reads": value.reads,
                    "uses": value.uses,
                    "manual_override": value.manual_override,
                    "effective": value.effective(),
                },
            }

    # -- sessions -----------------------------------------------------

    def _session_or_404(session_id: str) -> dict:
        session = state.sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    def _suggestions_for(
        source_lang: LanguageTag, target_lang: LanguageTag, text: str
    ) -> list[dict]:
        suggestions = []
        for record in state.database.lookup_exact(source_lang, text):
            translation = record.segments.get(target_lang)
            if translation is not None:
                suggestions.append(
                    {"record_id": record.id, "text": translation, "score": 1.0}
                )
        return suggestions

    def _segment_view(session: dict, index: int) -> dict:
        segment = session["segments"][index]
        return {
            "index": index,
            "source_text": segment["source_text"],
            "state": segment["state"],
            "text": segment["text"],
            "record_id": segment.get("record_id"),
            "suggestions": segment["suggestions"],
        }

    @app.post("/sessions", status_code=201)
    async def open_session(request: Request, source: str, target: str):
        source_lang = _parse_lang_or_400(source)
        target_lang = _parse_lang_or_400(target)
        if source_lang == target_lang:
            raise HTTPException(status_code=400, detail="source and target must differ")
        body = await request.body()
        diagnostics = [d for d in validate(body) if d.severity == "error"]
        if diagnostics:
            raise HTTPException(
                status_code=400,
                detail={"message": "dossier does not validate", "diagnostics": [str(d) for d in diagnostics]},
            )
        try:
            dossier = unpack(body)
        except (NotAZip, MissingHeader, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        if target_lang not in dossier.languages:
            raise HTTPException(
                status_code=400,
                detail=f"target {target_lang.code} is not declared by the dossier",
            )
        if dossier.parallel is None or source_lang not in dossier.parallel.versions:
            raise HTTPException(
                status_code=400,
                detail=f"dossier has no {source_lang.code} version to translate from",
            )

        source_st = dossier.parallel.versions[source_lang]
        with state.lock:
            segments = []
            for path in _content_leaf_paths(source_st):
                text = source_st.text_of(source_st.resolve(path))
                segments.append(
                    {
                        "path": list(path),
                        "source_text": text,
                        "state": "untouched",
                        "text": "",
                        "suggestions": _suggestions_for(source_lang, target_lang, text),
                    }
                )
            session_id = _fresh_id()
            state.sessions[session_id] = {
                "id": session_id,
                "dossier": dossier.dossier_id,
                "source": source_lang.code,
                "target": target_lang.code,
                "completed": False,
                "document": jsonio.st_to_dict(source_st),
                "segments": segments,
            }
            state.med_path(session_id).write_bytes(body)
            state.save_session(session_id)

        uri = f"/sessions/{session_id}"
        return Response(
            content=json.dumps(
                {
                    "uri": uri,
                    "id": session_id,
                    "dossier": dossier.dossier_id,
                    "source": source_lang.code,
                    "target": target_lang.code,
                    "segments": len(state.sessions[session_id]["segments"]),
                }
            ),
            status_code=201,
            media_type="application/json",
            headers={"Location": uri},
        )

    @app.get("/sessions")
    async def list_sessions(active: bool = False):
        out = []
        for session_id in sorted(state.sessions):
            session = state.sessions[session_id]
            if active and session["completed"]:
                continue
            confirmed = sum(1 for s in session["segments"] if s["state"] == "confirmed")
            out.append(
                {
                    "id": session_id,
                    "uri": f"/sessions/{session_id}",
                    "dossier": session["dossier"],
                    "source": session["source"],
                    "target": session["target"],
                    "completed": session["completed"],
                    "confirmed": confirmed,
                    "segments": len(session["segments"]),
                }
            )
        return {"sessions": out}

    @app.get("/sessions/{session_id}/segments")
    async def get_segments(session_id: str):
        session = _session_or_404(session_id)
        return {
            "id": session_id,
            "dossier": session["dossier"],
            "source": session["source"],
            "target": session["target"],
            "completed": session["completed"],
            "segments": [_segment_view(session, i) for i in range(len(session["segments"]))],
        }

    @app.put("/sessions/{session_id}/segments/{index}")
    async def put_segment(session_id: str, index: int, payload: dict):
        session = _session_or_404(session_id)
        if session["completed"]:
            raise HTTPException(status_code=409, detail="session is completed")
        if not 0 <= index < len(session["segments"]):
            raise HTTPException(status_code=404, detail="no such segment")
        segment_state = payload.get("state")
        if segment_state not in ("draft", "confirmed"):
            raise HTTPException(status_code=400, detail="state must be 'draft' or 'confirmed'")
        text = payload.get("text", "")
        if not isinstance(text, str):
            raise HTTPException(status_code=400, detail="text must be a string")
        if segment_state == "confirmed" and not text.strip():
            raise HTTPException(status_code=400, detail="confirmed segments need text")
        record_id = payload.get("record_id")
        if record_id is not None and not isinstance(record_id, int):
            raise HTTPException(status_code=400, detail="record_id must be an integer")

        with state.lock:
            segment = session["segments"][index]
            segment["state"] = segment_state
            segment["text"] = text
            if record_id is not None:
                if state.database.get(record_id) is None:
                    raise HTTPException(status_code=400, detail=f"no record r{record_id}")
                segment["record_id"] = record_id
                bump_value(state.database, record_id, "use")
                state.save_database()
            elif "record_id" in segment:
                del segment["record_id"]
            state.save_session(session_id)
            return _segment_view(session, index)

    @app.post("/sessions/{session_id}/segments/{index}/adjust")
    async def adjust_segment(session_id: str, index: int, payload: dict):
        session = _session_or_404(session_id)
        if session["completed"]:
            raise HTTPException(status_code=409, detail="session is completed")
        if not 0 <= index < len(session["segments"]):
            raise HTTPException(status_code=404, detail="no such segment")
        op = payload.get("op")
        if op not in ("split", "merge"):
            raise HTTPException(status_code=400, detail="op must be 'split' or 'merge'")

        with state.lock:
            document = jsonio.st_from_dict(session["document"])
            entry = session["segments"][index]
            path = tuple(entry["path"])
            if op == "split":
                offset = payload.get("offset")
                if not isinstance(offset, int) or isinstance(offset, bool):
                    raise HTTPException(
                        status_code=400, detail="split needs an integer character offset"
                    )
                if not 0 < offset < len(entry["source_text"]):
                    raise HTTPException(
                        status_code=400,
                        detail="offset must fall strictly inside the segment text",
                    )
                leaf = document.resolve(path)
                prefix = entry["source_text"][:offset]
                edit = SplitSegment(path, leaf.start + len(prefix.encode("utf-8")))
            else:
                edit = MergeWithNext(path)
            try:
                document = apply_manual_edit(document, edit)
            except InvalidEdit as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc

            source_lang = parse_tag(session["source"])
            target_lang = parse_tag(session["target"])
            old_document = jsonio.st_from_dict(session["document"])
            by_span = {}
            for old in session["segments"]:
                leaf = old_document.resolve(tuple(old["path"]))
                by_span[(leaf.start, leaf.end)] = old
            segments = []
            for new_path in _content_leaf_paths(document):
                leaf = document.resolve(new_path)
                carried = by_span.get((leaf.start, leaf.end))
                if carried is not None:
                    fresh = dict(carried)
                    fresh["path"] = list(new_path)
                else:
                    text = document.text_of(leaf)
                    fresh = {
                        "path": list(new_path),
                        "source_text": text,
                        "state": "untouched",
                        "text": "",
                        "suggestions": _suggestions_for(source_lang, target_lang, text),
                    }
                segments.append(fresh)
            session["document"] = jsonio.st_to_dict(document)
            session["segments"] = segments
            state.save_session(session_id)
            return {
                "id": session_id,
                "completed": session["completed"],
                "segments": [_segment_view(session, i) for i in range(len(segments))],
            }

    @app.get("/sessions/{session_id}/peer/{lang}")
    async def peer_segments(session_id: str, lang: str):
        session = _session_or_404(session_id)
        peer_lang = _parse_lang_or_400(lang)
        peers = []
        for other_id in sorted(state.sessions):
            other = state.sessions[other_id]
            if other_id == session_id:
                continue
            if other["dossier"] != session["dossier"] or other["target"] != peer_lang.code:
                continue
            confirmed = [
                {"index": i, "text": seg["text"]}
                for i, seg in enumerate(other["segments"])
                if seg["state"] == "confirmed"
            ]
            peers.append({"session": other_id, "completed": other["completed"], "segments": confirmed})
        return {"peers": peers}

    @app.post("/sessions/{session_id}/complete")
    async def complete_session(session_id: str):
        session = _session_or_404(session_id)
        with state.lock:
            completed_path = state.med_path(session_id, completed=True)
            if session["completed"]:
                return Response(content=completed_path.read_bytes(), media_type="application/zip")

            dossier = unpack(state.med_path(session_id).read_bytes())
            source_lang = parse_tag(session["source"])
            target_lang = parse_tag(session["target"])
            completed_med = _weave_target(
                dossier, session, source_lang, target_lang, state.database
            )
            data = pack(completed_med)
            completed_path.write_bytes(data)
            session["completed"] = True
            state.save_session(session_id)
            state.save_database()
        return Response(content=data, media_type="application/zip")

    return app


def _weave_target(
    dossier: MedDossier,
    session: dict,
    source_lang: LanguageTag,
    target_lang: LanguageTag,
    database: LinguisticTable,
) -> MedDossier:
    """Assemble the target version and fold it into the dossier.

    Translated segments (confirmed or draft) replace their source spans;
    untouched segments are left out as broken lines.  Confirmed pairs are
    harvested into the database; entirety is ``complete`` only when every
    segment was confirmed.

    The source tree comes from the session, not the dossier: the
    translator may have split or merged segments, and the published
    dossier keeps that corrected segmentation.  Original alignment
    groups are carried over by matching byte spans; a group whose
    source segment no longer exists as one node is dropped.
    """
    parallel = dossier.parallel
    source_st = jsonio.st_from_dict(session["document"])
    data = source_st.encoded

    span_to_path = {
        (node.start, node.end, node.kind): path
        for path, node in _all_nodes(source_st.root)
    }
    original_source = parallel.versions[source_lang]
    carried_groups = []
    for group in parallel.groups:
        members = dict(group.member_map)
        member = members.get(source_lang)
        if member is not None:
            old = original_source.resolve(tuple(member))
            new_path = span_to_path.get((old.start, old.end, old.kind))
            if new_path is None:
                continue
            members[source_lang] = new_path
        carried_groups.append(AlignmentGroup.of(group.kind, members))

    pieces: list[Piece] = []
    translated: list[tuple[tuple[int, ...], bool]] = []  # (source path, confirmed)
    cursor = 0
    for segment in session["segments"]:
        path = tuple(segment["path"])
        leaf = source_st.resolve(path)
        residue = data[cursor:leaf.start].decode("utf-8")
        if residue:
            pieces.append(Piece(residue))
        cursor = leaf.end
        if segment["state"] == "untouched" or not segment["text"]:
            continue  # broken line: the source span contributes nothing
        uri = None
        if segment.get("record_id") is not None:
            uri = record_uri(base_uri(database), segment["record_id"])
        pieces.append(Piece(segment["text"], record_uri=uri, marked=True))
        translated.append((path, segment["state"] == "confirmed"))
    tail = data[cursor:].decode("utf-8")
    if tail:
        pieces.append(Piece(tail))

    target_st, target_paths = assemble_pieces(pieces, target_lang)

    groups = carried_groups
    by_source_path: dict[tuple[int, ...], int] = {}
    for g_idx, group in enumerate(groups):
        member = group.member_map.get(source_lang)
        if member is not None:
            by_source_path[tuple(member)] = g_idx
    confirmed_group_ids: set[int] = set()
    for (path, confirmed), target_path in zip(translated, target_paths):
        g_idx = by_source_path.get(path)
        if g_idx is not None:
            members = dict(groups[g_idx].member_map)
            members[target_lang] = target_path
            groups[g_idx] = AlignmentGroup.of(groups[g_idx].kind, members)
        else:
            groups.append(
                AlignmentGroup.of(
                    SegmentKind.SENTENCE,
                    {source_lang: path, target_lang: target_path},
                )
            )
            g_idx = len(groups) - 1
        if confirmed:
            confirmed_group_ids.add(g_idx)

    all_confirmed = bool(session["segments"]) and all(
        s["state"] == "confirmed" for s in session["segments"]
    )
    entirety = dict(parallel.entirety)
    entirety[target_lang] = EntiretySet.of(
        Entirety.COMPLETE if all_confirmed else Entirety.TRANSLATING
    )

    versions = dict(parallel.versions)
    versions[source_lang] = source_st
    versions[target_lang] = target_st
    new_parallel = ParallelTexts(
        versions=versions,
        groups=tuple(groups),
        granularity=parallel_granularity(versions.values()),
        entirety=entirety,
        provenance=parallel.provenance or f"med:{dossier.dossier_id}",
    )

    harvest_pt = replace(
        new_parallel,
        groups=tuple(
            group
            for g_idx, group in enumerate(new_parallel.groups)
            if g_idx in confirmed_group_ids
        ),
    )
    harvest(harvest_pt, database)

    header = dict(dossier.header)
    declared = [lang.code for lang in dossier.languages]
    if target_lang.code not in declared:
        header["languages"] = ",".join(declared + [target_lang.code])
    header.pop(f"entirety.{target_lang.code}", None)

    return MedDossier(header=header, parallel=new_parallel, artefacts=dossier.artefacts)


def serve(
    data_dir: str | Path | None = None, host: str = "127.0.0.1", port: int = 8420
) -> None:
    """Run the service with uvicorn (blocking)."""
    import uvicorn

    uvicorn.run(create_app(data_dir), host=host, port=port, log_level="info")
