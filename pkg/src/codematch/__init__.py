"""codematch: mine noisy parallel code-translation datasets from two
monolingual code corpora via document similarity."""

__version__ = "0.1.0"

from .corpus import (Corpus, Document, ProblemSetCorpus, filter_by_token_count,
                     ingest_directory, ingest_records, tokenize_corpus)
from .lexer import LexerConfig, Token, token_counts, tokenize
from .vectorizer import (SparseVector, UnrepresentableDocument, Vocabulary,
                         bow, build_vocabulary, nbow, tfidf_vector)
from .engines import EngineConfig, bm25_score, fit
from .embeddings import (EmbeddingTable, ground_cost, load_embeddings,
                         save_embeddings, train_embeddings)
from .emd import TransportPlan, TransportProblem, emd_solve
from .wmd import (WmdRetriever, rwmd_lower_bound, wcd_lower_bound,
                  wmd_distance, wmd_top_k)
from .matcher import (MatchConfig, MatchedPair, ParallelCorpus,
                      create_parallel_corpus, export_pairs,
                      get_similar_documents, import_pairs)
from .evaluation import (EvaluationReport, GroundTruthAlignment,
                         dataset_stats, inject_noise, match_accuracy,
                         pseudo_match_accuracy, sample_test_split,
                         similarity_histogram)
