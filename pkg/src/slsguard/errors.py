"""Exception taxonomy for the toolkit.

Analysis-time failures raise; runtime verification never raises from the
verifier itself (all verification failure modes are Deny decisions).
"""

from __future__ import annotations


class SlsGuardError(Exception):
    """Base class for all toolkit errors."""


class UnrecognizedLanguage(SlsGuardError):
    """No extension, import, or syntax signal identified the language."""


class ConflictingVendors(SlsGuardError):
    """Imports from multiple vendors with no dominant instantiated client."""

    def __init__(self, vendors, message=None):
        self.vendors = sorted(str(v) for v in vendors)
        super().__init__(message or f"conflicting SDK vendors: {', '.join(self.vendors)}")


class UnsupportedCombination(SlsGuardError):
    """Language/vendor pair outside the supported matrix (Go + Azure)."""


class ParseError(SlsGuardError):
    """Source is syntactically invalid; carries file location."""

    def __init__(self, message, path="", line=0, column=0):
        self.path = path
        self.line = line
        self.column = column
        super().__init__(f"{path}:{line}:{column}: {message}" if path else message)


class RuleError(SlsGuardError):
    """Rule file missing, malformed, or failing its schema."""


class MissingRule(SlsGuardError):
    """A matched call site lost its rule between detection and mapping."""


class UnmappableAction(SlsGuardError):
    """A unified action has no rendering for the requested vendor."""

    def __init__(self, action, vendor):
        self.action = action
        self.vendor = vendor
        super().__init__(f"action {action!r} has no {vendor} rendering")


class MissingNaming(SlsGuardError):
    """Vendor resource grammar needs an identifier the naming config lacks."""

    def __init__(self, key, vendor):
        self.key = key
        self.vendor = vendor
        super().__init__(f"naming config missing {key!r} required for {vendor} resources")


class MissingEnvValue(SlsGuardError):
    """Strict allowlist build found an unresolved environment placeholder."""

    def __init__(self, name):
        self.name = name
        super().__init__(f"no value for environment variable {name!r}")


class UnparseablePolicy(SlsGuardError):
    """A live policy file cannot be parsed or fails its vendor schema."""


class AnchorNotFound(SlsGuardError):
    """Instrumentation could not locate a required insertion point."""


class AlreadyInstrumented(SlsGuardError):
    """Input already carries the instrumentation sentinel marker."""


class UsageError(SlsGuardError):
    """CLI invoked with unusable arguments (exit code 64)."""
