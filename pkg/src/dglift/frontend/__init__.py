"""Instance documents, the random generator and the command line."""
from .document import (
    AlgebraDecl,
    DerivationDecl,
    GenDecl,
    Instance,
    InstanceDocument,
    ModuleDecl,
    ParseError,
    elaborate,
    format_document,
    load_instance,
    parse_document,
    parse_instance,
)
from .generate import PROFILES, GenerationStats, generate_random_instance, generate_random_text
