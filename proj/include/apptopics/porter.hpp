#pragma once

#include <string>
#include <string_view>

namespace apptopics {

// The Porter (1980) suffix-stripping stemmer, following the revised reference
// implementation published by its author (the version that produces the
// standard voc.txt / output.txt pair). Input is expected to be lowercase;
// words of length <= 2 are returned unchanged.
std::string porter_stem(std::string_view word);

}  // namespace apptopics
