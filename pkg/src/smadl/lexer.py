"""Tokenizer for SMADL source text.

Produces a flat token stream plus diagnostics; unknown characters are
reported and skipped so the parser always sees a well-formed stream.
``//`` starts a line comment. ``to`` is contextual and lexed as an
identifier; the parser gives it meaning inside relationship heads.
"""

import re
from dataclasses import dataclass
from enum import Enum

from .model import Diagnostic, Severity, SourceSpan

KEYWORDS = frozenset(
    {
        "SocialMachineNetwork",
        "SocialMachine",
        "ProcessingUnit",
        "Input",
        "Output",
        "States",
        "Constraint",
        "Property",
        "WrapperInterface",
        "Request",
        "Parameters",
        "Response",
        "Relationships",
        "ConnectionSettings",
    }
)

# Longest match first: two-character operators before their prefixes.
PUNCTUATION = ("<=", ">=", "==", "!=", "=", "{", "}", "(", ")", ":", ";", ",", "<", ">", "[", "]")

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER = re.compile(r"[0-9]+(?:\.[0-9]+)?")
# A string body: anything but quote/backslash/newline, or a backslash escape.
_STRING_BODY = re.compile(r'(?:[^"\\\n]|\\[^\n])*')
_TWO_CHAR = frozenset(p for p in PUNCTUATION if len(p) == 2)
_ONE_CHAR = frozenset(p for p in PUNCTUATION if len(p) == 1)
_ESCAPE = re.compile(r'\\(["\\])')


class TokenKind(Enum):
    IDENT = "identifier"
    KEYWORD = "keyword"
    STRING = "string"
    NUMBER = "number"
    PUNCT = "punctuation"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    span: SourceSpan
    # Decoded value: str for strings (escapes resolved), int/float for numbers.
    value: str | int | float | None = None

    def is_punct(self, lexeme: str) -> bool:
        return self.kind is TokenKind.PUNCT and self.lexeme == lexeme

    def is_keyword(self, word: str) -> bool:
        return self.kind is TokenKind.KEYWORD and self.lexeme == word


def tokenize(source: str) -> tuple[list[Token], list[Diagnostic]]:
    """Lex ``source`` into tokens; never raises on bad input."""
    tokens: list[Token] = []
    diagnostics: list[Diagnostic] = []
    pos, line, col = 0, 1, 1
    size = len(source)

    while pos < size:
        ch = source[pos]

        if ch == "\n":
            pos += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            pos += 1
            col += 1
            continue
        if ch == "/" and source.startswith("//", pos):
            end = source.find("\n", pos)
            pos = size if end < 0 else end  # the newline restarts the loop
            continue

        if ch.isalpha() or ch == "_":
            lexeme = _IDENT.match(source, pos).group()
            width = len(lexeme)
            span = SourceSpan(line, col, line, col + width)
            kind = TokenKind.KEYWORD if lexeme in KEYWORDS else TokenKind.IDENT
            tokens.append(Token(kind, lexeme, span, lexeme))
            pos += width
            col += width
            continue

        if ch.isdigit():
            lexeme = _NUMBER.match(source, pos).group()
            width = len(lexeme)
            span = SourceSpan(line, col, line, col + width)
            value = float(lexeme) if "." in lexeme else int(lexeme)
            tokens.append(Token(TokenKind.NUMBER, lexeme, span, value))
            pos += width
            col += width
            continue

        if ch == '"':
            body = _STRING_BODY.match(source, pos + 1).group()
            terminated = pos + 1 + len(body) < size and source[pos + 1 + len(body)] == '"'
            width = len(body) + (2 if terminated else 1)
            span = SourceSpan(line, col, line, col + width)
            if not terminated:
                diagnostics.append(
                    Diagnostic(
                        Severity.ERROR,
                        "LEX_UNTERMINATED_STRING",
                        "string literal is not terminated",
                        span,
                    )
                )
            value = _ESCAPE.sub(r"\1", body)
            tokens.append(Token(TokenKind.STRING, f'"{value}"', span, value))
            pos += width
            col += width
            continue

        two = source[pos : pos + 2]
        if two in _TWO_CHAR:
            tokens.append(Token(TokenKind.PUNCT, two, SourceSpan(line, col, line, col + 2)))
            pos += 2
            col += 2
            continue
        if ch in _ONE_CHAR:
            tokens.append(Token(TokenKind.PUNCT, ch, SourceSpan(line, col, line, col + 1)))
            pos += 1
            col += 1
            continue

        diagnostics.append(
            Diagnostic(
                Severity.ERROR,
                "LEX_UNKNOWN_CHAR",
                f"unknown character {ch!r}",
                SourceSpan(line, col, line, col + 1),
            )
        )
        pos += 1
        col += 1

    return tokens, diagnostics
