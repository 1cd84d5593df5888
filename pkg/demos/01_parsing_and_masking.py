"""Parsing a judgment into sentences and masking named entities.

Documents enter the toolkit as plain text. The parser splits them into
sentences with detached punctuation tokens, keeping enough structure for
everything downstream: role tagging, summarization, chunking, prediction.
Entity masking replaces surface forms with numbered placeholders so a
model cannot memorize party names or citations.

Run: python3 demos/01_parsing_and_masking.py
"""

from factverdict import EntitySpan, mask_entities, parse_document
from factverdict.corpus import find_entity_spans

TEXT = (
    "The appellant Ram Lal was convicted by the Sessions Court on 12 March 1971. "
    "The conviction relied on AIR 1973 SC 1461 and the recovered ledger. "
    "Ram Lal appealed to this Court on 2 April 1971."
)

# --- 1. parse ------------------------------------------------------------

doc = parse_document(TEXT, "demo-appeal")
print(f"document {doc.id!r}: {len(doc.sentences)} sentences")
for sent in doc.sentences:
    print(f"  [{sent.index}] {len(sent.tokens):2d} tokens | {sent.text}")

# --- 2. built-in span provider -------------------------------------------

# The bundled provider is deliberately narrow: DATE and CASEREF regexes.
# Everything else (parties, judges, courts) comes from an external NER
# pass supplied as a sidecar; here we add one PERSON span by hand.
spans = find_entity_spans(doc)
for span in spans:
    surface = " ".join(doc.sentences[span.sentence_index].tokens[span.token_start:span.token_end])
    print(f"found {span.category:7s} s{span.sentence_index} "
          f"tokens [{span.token_start}:{span.token_end}] = {surface!r}")

spans.append(EntitySpan(sentence_index=0, token_start=2, token_end=4, category="PERSON"))
spans.append(EntitySpan(sentence_index=2, token_start=0, token_end=2, category="PERSON"))

# --- 3. mask --------------------------------------------------------------

# Repeated mentions of the same surface share a number: both "Ram Lal"
# spans become <PERSON_1>, so coreference survives the masking.
masked = mask_entities(doc, spans)
print()
print("masked document:")
for sent in masked.sentences:
    print(f"  [{sent.index}] {sent.text}")
