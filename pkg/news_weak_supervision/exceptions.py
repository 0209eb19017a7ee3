"""Custom exceptions for the weak supervision pipeline"""

from typing import Optional


class WeakSupervisionError(Exception):
    """Base exception for weak supervision pipeline errors"""
    pass


class ConfigError(WeakSupervisionError):
    """Exception raised for configuration errors"""
    pass


class LineFormatError(WeakSupervisionError):
    """Exception raised for a malformed line in an input file"""

    def __init__(self, message: str, path: Optional[str] = None, line_number: Optional[int] = None):
        self.path = path
        self.line_number = line_number
        location = ""
        if path is not None:
            location = f"{path}"
        if line_number is not None:
            location = f"{location}:{line_number}" if location else f"line {line_number}"
        super().__init__(f"{location}: {message}" if location else message)


class CorpusFormatError(LineFormatError):
    """Exception raised for malformed corpus records"""
    pass


class DuplicateDocumentError(WeakSupervisionError):
    """Exception raised when a doc_id occurs twice in one corpus"""

    def __init__(self, doc_id: str):
        self.doc_id = doc_id
        super().__init__(f"Duplicate doc_id: {doc_id}")


class UnknownDocumentError(WeakSupervisionError):
    """Exception raised when a doc_id is not known to the corpus or index"""

    def __init__(self, doc_id: str):
        self.doc_id = doc_id
        super().__init__(f"Unknown doc_id: {doc_id}")


class IndexFormatError(WeakSupervisionError):
    """Exception raised for unreadable or incompatible index files"""
    pass


class EmbeddingFormatError(LineFormatError):
    """Exception raised for malformed embedding files"""
    pass


class TemplateFormatError(LineFormatError):
    """Exception raised for malformed template files"""
    pass


class PairFormatError(LineFormatError):
    """Exception raised for malformed stage files (pairs, selection, triples)"""
    pass


class TrecFormatError(LineFormatError):
    """Exception raised for malformed qrels, run or score files"""
    pass


class VectorLengthError(WeakSupervisionError):
    """Exception raised for vector length mismatches or invalid shifts"""
    pass


class SamplingError(WeakSupervisionError):
    """Exception raised when training batches cannot be sampled"""
    pass


class StageError(WeakSupervisionError):
    """Exception raised when a pipeline stage fails"""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")
