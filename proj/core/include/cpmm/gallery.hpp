#ifndef CPMM_GALLERY_HPP
#define CPMM_GALLERY_HPP

#include <memory>
#include <string>
#include <vector>

#include "cpmm/mapspec.hpp"

namespace cpmm::gallery {

// Built-in example maps.  Each entry carries the canonical document text plus
// the outcomes the test suite executes against it.
struct Entry {
    std::string key;
    std::string title;
    std::string doc;
    std::string expected_mixing;     // "likely-mixing", "not-mixing period 2", "not-mixing no-loops", "inconclusive"
    std::string expected_conjugacy;  // behavioral note, e.g. "model on a finite interval"
};

const std::vector<Entry>& entries();
const Entry* find(const std::string& key);

// Parsed-and-validated spec for a gallery key (cached).
std::shared_ptr<const MapSpec> load(const std::string& key);

// The slope-2 companion of the piecewise-continuous example: identical Markov
// structure, every branch a single affine map of slope 2.  Used by the
// wandering-interval witness tests.
std::shared_ptr<const MapSpec> s11_partner();

// Reflection construction: the non-mixing document is generated from the
// extended-line document (rules copied with targets reflected, plus the
// reflecting branch), not hand-written.
std::string make_nonmixing_document();

}  // namespace cpmm::gallery

#endif
