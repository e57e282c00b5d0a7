"""Language-agnostic source code lexer.

One generic maximal-munch lexer for every programming language: the
matching pipeline has to work for arbitrary language pairs, so there are
no per-language grammars here. Any byte sequence lexes; unterminated
string literals run to end of line and unterminated block comments run
to end of file.
"""

import re
from dataclasses import dataclass

__all__ = ["Token", "LexerConfig", "tokenize", "token_counts"]

IDENTIFIER = "identifier"
KEYWORD = "keyword-like"
NUMBER = "number"
STRING = "string-literal"
OPERATOR = "operator"
PUNCTUATION = "punctuation"
COMMENT_WORD = "comment-word"

# Keywords shared by many mainstream languages; tagging is cosmetic
# (similarity methods only look at token text).
_KEYWORDS = frozenset("""
    if else elif for while do switch case break continue return goto
    def func fn function lambda class struct enum interface trait impl
    public private protected static final const var let val new delete
    try catch finally throw throws raise import include using package
    namespace int long short float double char bool boolean void string
    true false null nil none and or not in is this self super print
""".split())

_PUNCT_CHARS = frozenset("()[]{};,.")

_ID_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUM_RE = re.compile(r"\d+(?:\.\d*)?(?:[eE][+-]?\d+)?")
_WORD_RE = re.compile(r"[A-Za-z0-9_]+")
_SUBTOKEN_RE = re.compile(r"[A-Z]+(?![a-z])|[A-Z][a-z0-9]*|[a-z0-9]+")


@dataclass(frozen=True)
class Token:
    text: str
    kind: str


@dataclass(frozen=True)
class LexerConfig:
    """Fully determines tokenize() output for a given input.

    Defaults keep comments and string contents: both frequently carry
    problem-identifying text (prompts, embedded snippets) that drives
    cross-language matching.
    """
    split_subtokens: bool = False
    lowercase: bool = True
    keep_comments: bool = True
    keep_string_literal_contents: bool = True

    def to_dict(self):
        return {
            "split_subtokens": self.split_subtokens,
            "lowercase": self.lowercase,
            "keep_comments": self.keep_comments,
            "keep_string_literal_contents": self.keep_string_literal_contents,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def _split_subtokens(text):
    """Split an identifier at underscores and camelCase boundaries.

    "getCell" -> ["get", "Cell"]; "HTTP_server2Url" -> ["HTTP",
    "server2", "Url"]. Falls back to the original text when nothing
    survives (e.g. a bare "_").
    """
    pieces = _SUBTOKEN_RE.findall(text)
    return pieces if pieces else [text]


def tokenize(text, config=LexerConfig()):
    """Lex ``text`` into a normalized token stream.

    Deterministic for a fixed config; never raises on any input.
    """
    out = []

    def emit(tok_text, kind):
        if kind == IDENTIFIER and config.split_subtokens:
            parts = _split_subtokens(tok_text)
        else:
            parts = [tok_text]
        for part in parts:
            if config.lowercase:
                part = part.lower()
            out.append(Token(part, kind))

    def emit_words(chunk, kind):
        for word in _WORD_RE.findall(chunk):
            emit(word, kind)

    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue

        two = text[i:i + 2]
        # line comments: //, #, --
        if two == "//" or c == "#" or two == "--":
            end = text.find("\n", i)
            if end == -1:
                end = n
            if config.keep_comments:
                emit_words(text[i:end], COMMENT_WORD)
            i = end
            continue

        # block comments: /* ... */ (unterminated runs to EOF)
        if two == "/*":
            end = text.find("*/", i + 2)
            if end == -1:
                body, i = text[i + 2:], n
            else:
                body, i = text[i + 2:end], end + 2
            if config.keep_comments:
                emit_words(body, COMMENT_WORD)
            continue

        # string / char literals (unterminated runs to end of line)
        if c == '"' or c == "'":
            j = i + 1
            while j < n and text[j] != c and text[j] != "\n":
                j += 2 if text[j] == "\\" else 1
            body = text[i + 1:j]
            if j < n and text[j] == c:
                j += 1
            if config.keep_string_literal_contents:
                emit_words(body, STRING)
            i = j
            continue

        if c.isdigit():
            m = _NUM_RE.match(text, i)
            emit(m.group(), NUMBER)
            i = m.end()
            continue

        if c.isalpha() or c == "_":
            m = _ID_RE.match(text, i)
            word = m.group()
            kind = KEYWORD if word.lower() in _KEYWORDS else IDENTIFIER
            emit(word, kind)
            i = m.end()
            continue

        emit(c, PUNCTUATION if c in _PUNCT_CHARS else OPERATOR)
        i += 1

    return out


def token_counts(tokens):
    """Count occurrences per normalized token text."""
    counts = {}
    for tok in tokens:
        text = tok.text if isinstance(tok, Token) else tok
        counts[text] = counts.get(text, 0) + 1
    return counts
