"""Opinion-mining toolkit that answers auto-generated questionnaires from review corpora.

Pipeline stages: ingest reviews, train a document-polarity classifier,
extract candidate aspects with LDA, score per-aspect sentiment against an
opinion lexicon, and render a cross-corpus survey report.
"""

__version__ = "0.1.0"
