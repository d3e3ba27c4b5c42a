"""Toolkit for multilingual parallel texts.

The package covers the whole life of a document that exists in several
languages: segmenting text losslessly into addressable spans, aligning
versions, storing reusable translation pairs in linguistic tables,
generating new documents from record templates, packaging everything as
a self-contained dossier, and serving the lot over HTTP for interactive
translation work.

The most used names are re-exported here; the modules group the rest:

- ``langtags``: two-letter language tags and labelling checks
- ``segcore``: segmentation trees, granularity, manual edits
- ``markup``: XML, HTML and RTF front ends to the segmenter
- ``align``: parallel texts, alignment groups, entirety metadata
- ``jsonio``: JSON views of trees and alignments
- ``lingstore``: linguistic tables, fuzzy lookup, TMX/CSV/marked text
- ``gentext``: document templates expanded from table records
- ``medbox``: dossier packing, validation and indexing
- ``tmserver``: the HTTP service
- ``cli``: the ``partext`` command
"""

from .align import (
    AlignmentGroup,
    Entirety,
    EntiretySet,
    GranularityUnachievable,
    IllegalCombination,
    KindTooFine,
    ParallelTexts,
    align,
    granularity_meet,
    parallel_granularity,
    split_multilingual,
)
from .gentext import DocumentTemplate, GenerationError, generate, generate_all, parse_template
from .langtags import (
    FileLanguageMetadata,
    LanguageTag,
    MalformedTag,
    TagKind,
    UnknownCode,
    check_labelling,
    parse_tag,
)
from .lingstore import (
    LinguisticRecord,
    LinguisticTable,
    RecordValue,
    ScoredMatch,
    export_csv,
    export_tmx,
    extract_tm,
    harvest,
    import_csv,
    import_tmx,
    load_table,
    save_table,
)
from .medbox import Artefact, MedDossier, pack, unpack, validate
from .segcore import (
    Coverage,
    Segment,
    SegmentKind,
    SegmentationPolicy,
    SegmentedText,
    SeparatorCollision,
    TextGranularity,
    apply_manual_edit,
    reconstruct,
    segment_text,
)

__version__ = "0.1.0"
