#pragma once

#include <string>

#include "jdst/data.hpp"

namespace jdst {

// Deterministic generator for desk-scale dialogue corpora in the canonical
// schema: a restaurant domain (sim-r style) and a movie domain (sim-m style,
// where most dev/test movie names never occur in training). Dialogues follow
// a request/inform/offer/confirm flow with templated utterances, span
// annotations, per-turn act and intent labels, and accumulated dialogue
// states including dontcare.
struct SimOptions {
  int n_train = 1116;
  int n_dev = 349;
  int n_test = 775;
  uint64_t seed = 7;
};

struct SimCorpora {
  Corpus train, dev, test;
};

SimCorpora generate_restaurant_corpus(const SimOptions& opt);
SimCorpora generate_movie_corpus(const SimOptions& opt);

// Consistently replaces every value of `slot` (spans, states, system acts)
// with a fresh nonsense string of the same token count; used to probe the
// OOV pathway with values that cannot be in any vocabulary.
Corpus replace_slot_values_with_unseen(const Corpus& corpus, const std::string& slot,
                                       uint64_t seed);

}  // namespace jdst
