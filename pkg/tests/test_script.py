import json
import unicodedata
from collections import Counter

import pytest
from conftest import DOTLESS, arabic_text, mixed_text
from hypothesis import given, strategies as st

from dotless.script import (ALPHABET, LATIN, STRICT_UNDOT_RULE, UNDOT_RULE, CharClass,
                            UndotError, char_class, dump_alphabet, preprocess, undot,
                            undot_word_piece)

FATHA = "َ"


def test_alphabet_cardinalities():
    assert len(ALPHABET.dotted_letters) == 31
    assert len(ALPHABET.dotless_letters) == 19
    assert len(ALPHABET.diacritics) == 8


def test_dotless_set_is_image_of_dotted_set():
    images = set()
    for c in ALPHABET.dotted_letters:
        images.add(undot(c))
        images.add(undot(c + "ا")[0])
    assert images == ALPHABET.dotless_letters


def test_base_map_total_and_overrides_land_in_dotless_set():
    assert set(UNDOT_RULE.base_map) == ALPHABET.dotted_letters
    for letter, repl in UNDOT_RULE.positional_overrides:
        assert repl in ALPHABET.dotless_letters


def test_non_connectors_closed_under_undot():
    for c in ALPHABET.non_connectors:
        assert undot(c) in ALPHABET.non_connectors


def test_final_forms_from_table():
    assert undot("ن") == "ں"
    assert undot("ي") == "ى"
    assert undot("ق") == "ٯ"
    assert undot("ة") == "ه"
    assert undot("ء") == "ء"


@pytest.mark.parametrize("text,expected", [
    ("من", "مں"),
    ("الم", "الم"),
    ("بيت", "ٮٮٮ"),
    ("قلم", "ڡلم"),
    ("نبت قوي", "ٮٮٮ ڡوى"),
])
def test_undot_examples(text, expected):
    assert undot(text) == expected


def test_strict_rule_uses_table_only():
    assert undot("قلم", STRICT_UNDOT_RULE) == "ٯلم"
    assert undot("بيت", STRICT_UNDOT_RULE) == "ٮىٮ"


def test_undot_rejects_foreign_characters():
    with pytest.raises(UndotError) as err:
        undot("اب!")
    assert err.value.char == "!"
    assert err.value.offset == 2


def test_newline_and_passthrough_word_context():
    assert undot("من\nمن", passthrough="\n") == "مں\nمں"
    # a segmentation delimiter does not end the word
    assert undot("من+ه", passthrough="+") == "مٮ+ه"


def test_undot_word_piece():
    assert undot_word_piece("من", word_final=False) == "مٮ"
    assert undot_word_piece("من", word_final=True) == "مں"
    assert undot_word_piece("", word_final=False) == ""


def test_preprocess_arabic():
    assert preprocess("أهم" + FATHA + "!") == "اهم"
    assert preprocess("  ابجد   هوز\tحطي ") == "ابجد هوز حطي"
    assert preprocess("مؤمن سئل آمن ء") == "مومن سيل امن ء"
    assert preprocess("abc ١٢٣ 42") == ""


def test_preprocess_latin():
    assert preprocess("Hello, World! 42", LATIN) == "hello world"


def test_preprocess_histogram():
    dropped = Counter()
    preprocess("اب!! x", dropped=dropped)
    assert dropped == Counter({"!": 2, "x": 1})


def test_preprocess_drops_persian_letters():
    # peh and keheh are outside the 28-letter inventory
    assert preprocess("پاک") == "ا"


def test_char_class():
    assert char_class(FATHA) is CharClass.DIACRITIC
    assert char_class("ب") is CharClass.LETTER_DOTTED
    assert char_class("x") is CharClass.OTHER
    assert char_class("ٮ") is CharClass.LETTER_DOTLESS
    assert char_class("أ") is CharClass.HAMZA_CARRIER_FORM
    assert char_class(" ") is CharClass.SPACE


def test_dump_alphabet_is_json_and_consistent():
    data = json.loads(json.dumps(dump_alphabet(), ensure_ascii=False))
    assert data["dotted_count"] == 31
    assert data["dotless_count"] == 19
    for entry in data["dotted_letters"]:
        assert entry["dotless"] in DOTLESS
        assert unicodedata.name(entry["char"]) == entry["name"]


@given(mixed_text)
def test_undot_idempotent(text):
    once = undot(text)
    assert undot(once) == once


@given(arabic_text)
def test_undot_preserves_length_and_spaces(text):
    out = undot(text)
    assert len(out) == len(text)
    assert [i for i, c in enumerate(out) if c == " "] == [i for i, c in enumerate(text) if c == " "]
    assert set(out) <= ALPHABET.dotless_letters | {" "}


@given(st.text(max_size=40))
def test_preprocess_idempotent_arabic(text):
    once = preprocess(text)
    assert preprocess(once) == once
    assert set(once) <= ALPHABET.dotted_letters | {" "}


@given(st.text(max_size=40))
def test_preprocess_idempotent_latin(text):
    once = preprocess(text, LATIN)
    assert preprocess(once, LATIN) == once
    assert set(once) <= set("abcdefghijklmnopqrstuvwxyz ")


def test_preprocess_keep_dotless():
    assert preprocess("مں ڡلم!") == "م لم"
    assert preprocess("مں ڡلم!", keep_dotless=True) == "مں ڡلم"
