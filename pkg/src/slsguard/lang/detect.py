"""Language and vendor identification for source units.

Language detection runs extension -> import grammar -> syntax heuristics and
records the winning signal for diagnostics. Vendor identification matches
SDK imports against the rule tables; multi-vendor imports are resolved by
looking for a dominant instantiated client, otherwise reported as a
conflict.
"""

from __future__ import annotations

import re

from ..errors import ConflictingVendors, UnrecognizedLanguage
from ..model import Language, SourceUnit, Vendor, language_from_extension
from ..rules import rulesets_for_language

_IMPORT_PATTERNS = [
    (Language.PYTHON, re.compile(r"^\s*(import\s+\w|from\s+[\w.]+\s+import\s)", re.M)),
    (Language.JAVASCRIPT, re.compile(r"""(\brequire\s*\(\s*['"])|(^\s*import\s.+\sfrom\s)|(\bmodule\.exports\b)|(\bexports\.\w+\s*=)""", re.M)),
    (Language.GO, re.compile(r"^\s*package\s+\w+\s*$", re.M)),
]

_SYNTAX_SIGNALS = [
    (Language.GO, re.compile(r"\bfunc\s+\w+\s*\([^)]*\)[^{]*\{")),
    (Language.PYTHON, re.compile(r"^\s*def\s+\w+\s*\(.*\)\s*:", re.M)),
    (Language.JAVASCRIPT, re.compile(r"(=>\s*\{)|(\bfunction\s*\w*\s*\()|(\bconst\s+\w+\s*=)")),
]


def identify_language(unit: SourceUnit) -> Language:
    """Identify the language, recording the winning signal on the unit."""
    if not unit.text.strip():
        raise UnrecognizedLanguage(f"{unit.path}: empty source")
    by_ext = language_from_extension(unit.path)
    if by_ext is not None:
        unit.language = by_ext
        unit.language_signal = f"extension:{unit.path.suffix.lower()}"
        return by_ext
    for language, pattern in _IMPORT_PATTERNS:
        if pattern.search(unit.text):
            unit.language = language
            unit.language_signal = f"imports:{language.value}"
            return language
    for language, pattern in _SYNTAX_SIGNALS:
        if pattern.search(unit.text):
            unit.language = language
            unit.language_signal = f"syntax:{language.value}"
            return language
    raise UnrecognizedLanguage(f"{unit.path}: no extension, import, or syntax signal matched")


def _scan_modules(unit: SourceUnit, language: Language) -> list[str]:
    """Lightweight import scan (no full parse) for vendor matching."""
    modules: list[str] = []
    text = unit.text
    if language is Language.PYTHON:
        for m in re.finditer(r"^\s*import\s+([\w.]+(?:\s*,\s*[\w.]+)*)", text, re.M):
            for part in m.group(1).split(","):
                modules.append(part.strip().split(" ")[0])
        for m in re.finditer(r"^\s*from\s+([\w.]+)\s+import\s+([\w.,\s*]+)", text, re.M):
            base = m.group(1)
            modules.append(base)
            for part in m.group(2).split(","):
                name = part.strip().split(" ")[0]
                if name and name != "*":
                    modules.append(f"{base}.{name}")
    elif language is Language.JAVASCRIPT:
        for m in re.finditer(r"""require\s*\(\s*['"]([^'"]+)['"]\s*\)""", text):
            modules.append(m.group(1))
        for m in re.finditer(r"""^\s*import\s[^;]*?from\s+['"]([^'"]+)['"]""", text, re.M):
            modules.append(m.group(1))
    else:
        for m in re.finditer(r'^\s*import\s+(?:\w+\s+)?"([^"]+)"', text, re.M):
            modules.append(m.group(1))
        block = re.search(r"import\s*\(([^)]*)\)", text, re.S)
        if block:
            for m in re.finditer(r'"([^"]+)"', block.group(1)):
                modules.append(m.group(1))
    return modules


def identify_vendor(unit: SourceUnit, language: Language | None = None) -> Vendor:
    """Identify the cloud vendor from SDK imports and client instantiation."""
    language = language or unit.language
    if language is None:
        language = identify_language(unit)
    rulesets = rulesets_for_language(language)
    modules = _scan_modules(unit, language)
    candidates = []
    for rs in rulesets:
        if any(rs.module_is_sdk(module) for module in modules):
            candidates.append(rs)
    if not candidates:
        unit.vendor = Vendor.UNKNOWN
        return Vendor.UNKNOWN
    if len(candidates) == 1:
        unit.vendor = candidates[0].vendor
        return unit.vendor
    # Multiple vendors imported: the one whose clients are instantiated wins.
    from ..registry import build_semantic_registry

    instantiated = []
    for rs in candidates:
        probe = SourceUnit(path=unit.path, text=unit.text,
                           language=language, vendor=rs.vendor)
        try:
            registry = build_semantic_registry(probe, rs)
        except Exception:
            continue
        if any(site.provenance == "resolved" for site in registry.call_sites):
            instantiated.append(rs.vendor)
    if len(instantiated) == 1:
        unit.vendor = instantiated[0]
        return unit.vendor
    raise ConflictingVendors([rs.vendor.value for rs in candidates])
