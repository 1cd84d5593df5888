import json
import random

import pytest

from factverdict.corpus import (
    Document,
    DocumentView,
    EntitySpan,
    RhetoricalRole,
    attach_roles,
    corpus_to_jsonl,
    document_text,
    find_entity_spans,
    full_view,
    is_placeholder,
    load_corpus,
    load_entity_sidecar,
    load_role_sidecar,
    mask_entities,
    parse_document,
    save_corpus,
    strip_outcome,
    tokenize,
)
from factverdict.errors import (
    DuplicateIdError,
    EmptyDocumentError,
    MalformedLineError,
    SpanOutOfRangeError,
)


class TestParseDocument:
    def test_empty_input_rejected(self):
        with pytest.raises(EmptyDocumentError):
            parse_document("", "d0")
        with pytest.raises(EmptyDocumentError):
            parse_document("   \n\t ", "dws")

    def test_two_sentence_split(self):
        doc = parse_document("The appeal is allowed. Costs are waived.", "d1")
        assert len(doc.sentences) == 2
        assert list(doc.sentences[0].tokens) == ["The", "appeal", "is", "allowed", "."]
        assert list(doc.sentences[1].tokens) == ["Costs", "are", "waived", "."]
        assert doc.sentences[0].text == "The appeal is allowed."
        assert doc.sentences[1].text == "Costs are waived."

    def test_protected_abbreviation_not_split(self):
        doc = parse_document("Under Sec. 302 the appellant was convicted.", "d2")
        assert len(doc.sentences) == 1

    def test_all_protected_abbreviations(self):
        for abbr in ("No.", "Nos.", "vs.", "v.", "Sec.", "Art.", "Hon.",
                     "Mr.", "Mrs.", "Dr.", "Ors.", "Anr."):
            doc = parse_document(f"See {abbr} 42 for details.", f"d-{abbr}")
            assert len(doc.sentences) == 1, abbr

    def test_question_and_semicolon_boundaries(self):
        doc = parse_document("Was the order valid? The court said no; An appeal followed.", "d3")
        assert len(doc.sentences) == 3

    def test_no_split_before_lowercase(self):
        doc = parse_document("The act was repealed. yet the case continued.", "d4")
        assert len(doc.sentences) == 1

    def test_sentence_indices_sequential(self):
        doc = parse_document("One holds. Two holds. Three holds.", "d5")
        assert [s.index for s in doc.sentences] == [0, 1, 2]

    def test_whitespace_collapsed_in_text(self):
        doc = parse_document("The  order \n was   upheld.", "d6")
        assert doc.sentences[0].text == "The order was upheld."

    def test_tokens_match_text_modulo_whitespace(self):
        doc = parse_document(
            "Mr. Ram Lal (the appellant) filed I.A. No. 7 of 1998. It was heard.", "d7"
        )
        for sent in doc.sentences:
            assert "".join(sent.tokens) == "".join(sent.text.split())

    def test_deterministic(self):
        raw = "On 12.3.1990 the suit was filed. The trial court decreed it; An appeal came."
        a = parse_document(raw, "x")
        b = parse_document(raw, "y")
        assert [s.text for s in a.sentences] == [s.text for s in b.sentences]
        assert [s.tokens for s in a.sentences] == [s.tokens for s in b.sentences]


class TestTokenize:
    def test_punctuation_detached(self):
        assert list(tokenize("allowed.")) == ["allowed", "."]
        assert list(tokenize("(appellant)")) == ["(", "appellant", ")"]
        assert list(tokenize("'quoted,'")) == ["'", "quoted", ",", "'"]

    def test_lone_punctuation_kept(self):
        assert list(tokenize(". , ;")) == [".", ",", ";"]

    def test_internal_punctuation_kept(self):
        assert list(tokenize("12.3.1990")) == ["12.3.1990"]
        assert list(tokenize("Smt. Leela's")) == ["Smt", ".", "Leela's"]


class TestMaskEntities:
    def _doc(self):
        return parse_document(
            "Ram Lal filed the suit. The court heard him. Counsel replied. Ram Lal appealed.",
            "m1",
        )

    def test_no_spans_identity(self):
        doc = self._doc()
        assert mask_entities(doc, []) == doc

    def test_same_surface_shares_number(self):
        doc = self._doc()
        spans = [EntitySpan(0, 0, 2, "PERSON"), EntitySpan(3, 0, 2, "PERSON")]
        masked = mask_entities(doc, spans)
        assert masked.sentences[0].tokens[0] == "<PERSON_1>"
        assert masked.sentences[3].tokens[0] == "<PERSON_1>"

    def test_distinct_surfaces_numbered_in_order(self):
        doc = parse_document("Ram Lal sued Shyam over the land.", "m2")
        spans = [EntitySpan(0, 0, 2, "PERSON"), EntitySpan(0, 3, 4, "PERSON")]
        masked = mask_entities(doc, spans)
        toks = list(masked.sentences[0].tokens)
        assert toks[0] == "<PERSON_1>"
        assert "<PERSON_2>" in toks

    def test_numbering_independent_per_category(self):
        doc = parse_document("Ram Lal moved the Delhi bench.", "m3")
        spans = [EntitySpan(0, 0, 2, "PERSON"), EntitySpan(0, 4, 5, "LOC")]
        masked = mask_entities(doc, spans)
        toks = list(masked.sentences[0].tokens)
        assert "<PERSON_1>" in toks and "<LOC_1>" in toks

    def test_case_insensitive_surface_matching(self):
        doc = parse_document("RAM LAL appeared. Later ram lal left.", "m4")
        spans = [EntitySpan(0, 0, 2, "PERSON"), EntitySpan(1, 1, 3, "PERSON")]
        masked = mask_entities(doc, spans)
        assert masked.sentences[0].tokens[0] == "<PERSON_1>"
        assert "<PERSON_1>" in masked.sentences[1].tokens

    def test_span_replaces_whole_range(self):
        doc = parse_document("Ram Lal filed the suit.", "m5")
        masked = mask_entities(doc, [EntitySpan(0, 0, 2, "PERSON")])
        assert list(masked.sentences[0].tokens) == ["<PERSON_1>", "filed", "the", "suit", "."]

    def test_idempotent(self):
        doc = self._doc()
        spans = [EntitySpan(0, 0, 2, "PERSON"), EntitySpan(3, 0, 2, "PERSON")]
        once = mask_entities(doc, spans)
        twice = mask_entities(once, [])
        assert once == twice

    def test_out_of_range_sentence(self):
        with pytest.raises(SpanOutOfRangeError):
            mask_entities(self._doc(), [EntitySpan(9, 0, 1, "PERSON")])

    def test_out_of_range_token_end(self):
        with pytest.raises(SpanOutOfRangeError):
            mask_entities(self._doc(), [EntitySpan(0, 0, 99, "PERSON")])

    def test_overlapping_spans_rejected(self):
        spans = [EntitySpan(0, 0, 2, "PERSON"), EntitySpan(0, 1, 3, "ORG")]
        with pytest.raises(SpanOutOfRangeError):
            mask_entities(self._doc(), spans)

    def test_bad_category_rejected(self):
        with pytest.raises(ValueError):
            EntitySpan(0, 0, 1, "ANIMAL")

    def test_degenerate_span_rejected(self):
        with pytest.raises(ValueError):
            EntitySpan(0, 2, 2, "PERSON")


class TestEntityProvider:
    def test_numeric_date_found(self):
        doc = parse_document("The FIR was lodged on 12.3.1990 at the station.", "e1")
        spans = find_entity_spans(doc)
        cats = [(s.category, doc.sentences[s.sentence_index].tokens[s.token_start]) for s in spans]
        assert ("DATE", "12.3.1990") in cats

    def test_written_date_found(self):
        doc = parse_document("The decree passed on 5 March 1962 stands.", "e2")
        spans = find_entity_spans(doc)
        assert any(s.category == "DATE" and s.token_end - s.token_start == 3 for s in spans)

    def test_caseref_found(self):
        doc = parse_document("Reliance was placed on AIR 1973 SC 1461 by counsel.", "e3")
        spans = find_entity_spans(doc)
        assert any(s.category == "CASEREF" for s in spans)

    def test_placeholders_never_rematch(self):
        doc = parse_document("The FIR was lodged on 12.3.1990 at the station.", "e4")
        masked = mask_entities(doc, find_entity_spans(doc))
        assert find_entity_spans(masked) == []
        assert is_placeholder("<DATE_1>")
        assert not is_placeholder("12.3.1990")


class TestCorpusIO:
    def test_empty_file(self, tmp_path):
        p = tmp_path / "c.jsonl"
        p.write_text("")
        assert load_corpus(p) == []

    def test_missing_id_is_malformed_line_1(self, tmp_path):
        p = tmp_path / "c.jsonl"
        p.write_text('{"text": "The appeal is allowed."}\n')
        with pytest.raises(MalformedLineError) as exc:
            load_corpus(p)
        assert exc.value.line_no == 1

    def test_invalid_json_reports_line_number(self, tmp_path):
        p = tmp_path / "c.jsonl"
        p.write_text('{"id": "a", "text": "The appeal is allowed."}\n{oops\n')
        with pytest.raises(MalformedLineError) as exc:
            load_corpus(p)
        assert exc.value.line_no == 2

    def test_duplicate_id(self, tmp_path):
        p = tmp_path / "c.jsonl"
        line = '{"id": "a", "text": "The appeal is allowed."}\n'
        p.write_text(line + line)
        with pytest.raises(DuplicateIdError):
            load_corpus(p)

    def test_bad_label_rejected(self, tmp_path):
        p = tmp_path / "c.jsonl"
        p.write_text('{"id": "a", "text": "The appeal is allowed.", "label": 2}\n')
        with pytest.raises(MalformedLineError):
            load_corpus(p)

    def test_bad_split_rejected(self, tmp_path):
        p = tmp_path / "c.jsonl"
        p.write_text('{"id": "a", "text": "The appeal is allowed.", "split": "validation"}\n')
        with pytest.raises(MalformedLineError):
            load_corpus(p)

    def test_empty_text_is_malformed(self, tmp_path):
        p = tmp_path / "c.jsonl"
        p.write_text('{"id": "a", "text": "   "}\n')
        with pytest.raises(MalformedLineError):
            load_corpus(p)

    def test_three_splits_round_trip(self, tmp_path):
        p = tmp_path / "c.jsonl"
        rows = [
            {"id": "a", "text": "The suit was filed. It was decreed.", "label": 1, "split": "train"},
            {"id": "b", "text": "The appeal was heard.", "label": 0, "split": "dev"},
            {"id": "c", "text": "The revision was dismissed.", "split": "test"},
        ]
        p.write_text("".join(json.dumps(r) + "\n" for r in rows))
        docs = load_corpus(p)
        assert [d.id for d in docs] == ["a", "b", "c"]
        assert [d.split for d in docs] == ["train", "dev", "test"]
        assert [d.label for d in docs] == [1, 0, None]

        out = tmp_path / "out.jsonl"
        save_corpus(docs, out)
        again = load_corpus(out)
        assert again == docs

    def test_blank_lines_skipped(self, tmp_path):
        p = tmp_path / "c.jsonl"
        p.write_text('\n{"id": "a", "text": "The appeal is allowed."}\n\n')
        assert len(load_corpus(p)) == 1

    def test_random_round_trip(self, tmp_path):
        """Serialize/reparse is the identity on already-parsed corpora."""
        rng = random.Random(20240817)
        vocab = ["appeal", "court", "order", "suit", "counsel", "decree",
                 "evidence", "witness", "trial", "land", "accused", "appellant"]
        docs = []
        for d in range(30):
            n_sent = rng.randint(1, 8)
            parts = []
            for _ in range(n_sent):
                words = [rng.choice(vocab) for _ in range(rng.randint(2, 9))]
                parts.append(words[0].capitalize() + " " + " ".join(words[1:]) + ".")
            docs.append(
                parse_document(
                    " ".join(parts),
                    f"r{d}",
                    label=rng.choice([0, 1, None]),
                    split=rng.choice(["train", "dev", "test"]),
                )
            )
        p = tmp_path / "rt.jsonl"
        save_corpus(docs, p)
        again = load_corpus(p)
        assert again == docs
        # a second cycle is byte-identical
        assert corpus_to_jsonl(again) == corpus_to_jsonl(docs)


class TestStripOutcome:
    RPC = RhetoricalRole.RULING_PRESENT

    def _doc(self, n):
        text = " ".join(f"Sentence number {i} holds." for i in range(n))
        return parse_document(text, f"s{n}")

    def test_identity_without_ruling(self):
        doc = self._doc(3)
        roles = [RhetoricalRole.FACT] * 3
        view = strip_outcome(doc, roles)
        assert view.indices == (0, 1, 2)

    def test_single_ruling_removed(self):
        doc = self._doc(2)
        view = strip_outcome(doc, [RhetoricalRole.FACT, self.RPC])
        assert view.indices == (0,)

    def test_all_ruling_gives_empty_view(self):
        doc = self._doc(2)
        view = strip_outcome(doc, [self.RPC, self.RPC])
        assert view.indices == ()
        assert view.is_empty

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            strip_outcome(self._doc(3), [RhetoricalRole.FACT])

    def test_kept_set_is_exact_complement(self):
        rng = random.Random(7)
        all_roles = list(RhetoricalRole)
        for _ in range(50):
            n = rng.randint(1, 12)
            doc = self._doc(n)
            roles = [rng.choice(all_roles) for _ in range(n)]
            view = strip_outcome(doc, roles)
            assert set(view.indices) == {i for i in range(n) if roles[i] is not self.RPC}


class TestDocumentView:
    def test_indices_validated(self):
        doc = parse_document("One holds. Two holds.", "v1")
        with pytest.raises(ValueError):
            DocumentView(doc, (0, 5))
        with pytest.raises(ValueError):
            DocumentView(doc, (1, 0))

    def test_to_document_reindexes(self):
        doc = parse_document("One holds. Two holds. Three holds.", "v2")
        sub = DocumentView(doc, (0, 2)).to_document()
        assert [s.index for s in sub.sentences] == [0, 1]
        assert sub.sentences[1].text == "Three holds."

    def test_tokens_concatenate_in_order(self):
        doc = parse_document("One holds. Two holds.", "v3")
        assert full_view(doc).tokens() == ["One", "holds", ".", "Two", "holds", "."]


class TestSidecars:
    def test_entity_sidecar(self, tmp_path):
        p = tmp_path / "ents.jsonl"
        p.write_text(
            '{"id": "a", "spans": [{"sentence": 0, "start": 0, "end": 2, "category": "PERSON"}]}\n'
        )
        table = load_entity_sidecar(p)
        assert table["a"] == [EntitySpan(0, 0, 2, "PERSON")]

    def test_entity_sidecar_bad_category(self, tmp_path):
        p = tmp_path / "ents.jsonl"
        p.write_text(
            '{"id": "a", "spans": [{"sentence": 0, "start": 0, "end": 2, "category": "X"}]}\n'
        )
        with pytest.raises(MalformedLineError):
            load_entity_sidecar(p)

    def test_role_sidecar(self, tmp_path):
        p = tmp_path / "roles.jsonl"
        p.write_text('{"id": "a", "roles": ["Fact", "RulingByPresentCourt", "None"]}\n')
        table = load_role_sidecar(p)
        assert table["a"] == [
            RhetoricalRole.FACT,
            RhetoricalRole.RULING_PRESENT,
            RhetoricalRole.NONE,
        ]

    def test_role_sidecar_unknown_role(self, tmp_path):
        p = tmp_path / "roles.jsonl"
        p.write_text('{"id": "a", "roles": ["Microfact"]}\n')
        with pytest.raises(MalformedLineError):
            load_role_sidecar(p)

    def test_attach_roles(self):
        doc = parse_document("One holds. Two holds.", "a1")
        tagged = attach_roles(doc, [RhetoricalRole.FACT, RhetoricalRole.ISSUE])
        assert tagged.roles() == (RhetoricalRole.FACT, RhetoricalRole.ISSUE)
        with pytest.raises(ValueError):
            attach_roles(doc, [RhetoricalRole.FACT])


class TestRoleEnum:
    def test_serialization_strings_exact(self):
        assert [r.value for r in RhetoricalRole] == [
            "Fact", "Issue", "Argument", "Statute", "Precedent",
            "RatioOfDecision", "RulingByLowerCourt", "RulingByPresentCourt", "None",
        ]

    def test_from_string_round_trip(self):
        for role in RhetoricalRole:
            assert RhetoricalRole.from_string(role.value) is role
        with pytest.raises(ValueError):
            RhetoricalRole.from_string("fact")


class TestDocumentInvariants:
    def test_label_validated(self):
        sent = parse_document("The appeal is allowed.", "t").sentences
        with pytest.raises(ValueError):
            Document(id="t", sentences=sent, label=2)

    def test_split_validated(self):
        sent = parse_document("The appeal is allowed.", "t").sentences
        with pytest.raises(ValueError):
            Document(id="t", sentences=sent, split="holdout")

    def test_document_text_joins_sentences(self):
        doc = parse_document("One holds. Two holds.", "t2")
        assert document_text(doc) == "One holds. Two holds."
