#pragma once

#include <cstdint>
#include <string>

namespace bamc {

enum class ObjectKind { rectangle, ellipse, two_objects, mix };

ObjectKind object_kind_from_string(const std::string& s);  // throws InvalidInput
std::string to_string(ObjectKind kind);

// Deterministic synthetic corpus: same spec, same bytes.
struct SynthSpec {
    std::uint64_t seed = 42;
    int count = 100;
    int width = 400;
    int height = 300;
    ObjectKind kind = ObjectKind::mix;
    double contrast = 0.25;    // minimum object/background distance in normalized CIELAB
    bool adversarial = false;  // object color nearly equal to the background color
};

// Writes images/NNN.png and masks/NNN.png under out_dir and echoes the spec
// to spec.json. Objects stay clear of a 10% border band (non-adversarial
// placement is identical; only colors change). Throws InvalidInput when the
// dimensions leave no room for an object.
void generate(const SynthSpec& spec, const std::string& out_dir);

}  // namespace bamc
