#pragma once

// Bundled deterministic prose source. Pools fall back to this generator when
// the user supplies no corpus files, so the toolkit is self-contained. Output
// is plain ASCII sentences ending in '.', which keeps the sentence splitter
// and tag markers unambiguous.

#include <string>
#include <vector>

#include "lcif/rng.hpp"

namespace lcif::synth {

// One declarative sentence, capitalized, terminated with '.'.
std::string sentence(Rng& rng);

// Short imperative phrase (list-element style), terminated with '.'.
std::string instruction_phrase(Rng& rng);

// Multi-sentence paragraph.
std::string paragraph(Rng& rng, int n_sentences);

// Multi-paragraph essay; paragraphs separated by blank lines.
std::string essay(Rng& rng, int n_paragraphs, int sentences_per_paragraph);

// Noun-phrase title, e.g. "The Gravel Bar Survey".
std::string title(Rng& rng);

// Date string YYYY-MM-DD between 1980 and 2023.
std::string date(Rng& rng);

// Fixed outlet label set used for document source fields.
const std::vector<std::string>& source_labels();

}  // namespace lcif::synth
