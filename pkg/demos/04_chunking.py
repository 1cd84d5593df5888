"""Three chunking techniques for documents longer than the encoder window.

Judgments routinely run past any fixed input size. Technique 1 slides an
overlapping window across the whole stream; techniques 2 and 3 keep only
the last or first k tokens. The sliding span arithmetic is exact and has
a closed-form chunk count.

Run: python3 demos/04_chunking.py
"""

from factverdict.chunker import (
    ChunkingConfig,
    Technique,
    chunk_spans,
    chunk_token_slices,
    sliding_chunk_count,
)

TOTAL = 1000

# --- 1. sliding window ------------------------------------------------------

cfg = ChunkingConfig(technique=Technique.SLIDING, window=410, overlap=100)
spans = chunk_spans(TOTAL, cfg)
print(f"sliding window {cfg.window}/{cfg.overlap} over {TOTAL} tokens:")
for c in spans:
    print(f"  chunk {c.ordinal}: [{c.start:4d}, {c.end:4d})  length {c.length}")
print(f"closed form agrees: {sliding_chunk_count(TOTAL, cfg.window, cfg.overlap)} chunks")

# --- 2. last-k and first-k ---------------------------------------------------

for technique in (Technique.LAST, Technique.FIRST):
    c = chunk_spans(TOTAL, ChunkingConfig(technique=technique, k=510))[0]
    print(f"{technique.value:7s} k=510 -> [{c.start}, {c.end})")

# k larger than the stream clamps to the whole stream
c = chunk_spans(120, ChunkingConfig(technique=Technique.LAST, k=510))[0]
print(f"last    k=510 on 120 tokens -> [{c.start}, {c.end}) (clamped)")

# --- 3. chunks carry real tokens ---------------------------------------------

tokens = [f"t{i}" for i in range(12)]
small = ChunkingConfig(technique=Technique.SLIDING, window=5, overlap=2)
print(f"\n12 tokens, window 5, overlap 2:")
for position, piece in enumerate(chunk_token_slices(tokens, small)):
    print(f"  chunk {position}: {' '.join(piece)}")

# --- 4. overlap trades chunk count against context ----------------------------

print(f"\nchunk count for {TOTAL} tokens at window 410:")
for overlap in (0, 50, 100, 200, 300):
    n = sliding_chunk_count(TOTAL, 410, overlap)
    print(f"  overlap {overlap:3d} -> {n} chunks")
