"""Walk the whole chain in-process: author, translate, publish.

Builds a small linguistic table, expands a template into an aligned
bilingual document, mines a translation memory from a fresh source text,
and packs the result into a validated MED archive. Prints a compact
trace of every step. Deterministic, takes no arguments.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from partext.align import parallel_granularity
from partext.gentext import generate_all, parse_template
from partext.langtags import parse_tag
from partext.lingstore import (
    LinguisticTable,
    export_table,
    extract_tm,
    harvest,
)
from partext.medbox import Artefact, MedDossier, pack, validate
from partext.segcore import segment_text

EN = parse_tag("en")
ES = parse_tag("es")


def main() -> None:
    table = LinguisticTable(name="phrases")
    table.insert({EN: "Hello world.", ES: "Hola mundo."})
    table.insert({EN: "White cat.", ES: "Gato blanco."})
    table.insert({EN: "Good morning.", ES: "Buenos días."})
    print(f"table '{table.name}' with {len(table)} records")

    template = parse_template(
        "{r1} {r2} "
        "{lang:en}And finally: {/lang}{lang:es}Y por último: {/lang}"
        "{r3}"
    )
    pt = generate_all(template, table, [EN, ES])
    for lang, st in sorted(pt.versions.items(), key=lambda kv: kv[0].code):
        print(f"  generated [{lang.code}] {st.source!r}")
    print(f"  {len(pt.groups)} aligned groups, granularity {pt.granularity}")

    draft = segment_text("White cat. Something new entirely.", EN)
    memory = extract_tm(table, draft, [EN, ES], threshold=0.8)
    print(f"memory '{memory.name}' mined {len(memory)} records from a draft")

    grown = harvest(pt, table)
    print(f"harvest returned {grown} (everything came from the table already)")

    tmx = export_table(memory, [EN, ES], "tmx")
    dossier = MedDossier(
        header={"id": "demo-pipeline", "languages": "en, es", "title": "Pipeline demo"},
        parallel=pt,
        artefacts=(
            Artefact(role="translation-memory", name="memory.tmx", data=tmx.encode()),
        ),
    )
    archive = pack(dossier)
    problems = validate(archive)
    print(f"packed MED: {len(archive)} bytes, {len(problems)} lint findings")
    for diagnostic in problems:
        print(f"  {diagnostic}")

    pt2 = parallel_granularity(list(pt.versions.values()))
    print(f"version granularities meet at {pt2}")


if __name__ == "__main__":
    main()
