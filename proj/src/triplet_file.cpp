#include "gfrag/triplet_file.hpp"

#include <iomanip>
#include <sstream>

namespace gfrag {

LevyTriplet triplet_from_document(const KeyValueDocument& doc) {
    LevyTriplet t;
    t.sigma2 = doc.get_double("sigma2");
    t.drift = doc.get_double("drift");
    t.alpha = doc.get_double("alpha");
    const std::string family = doc.get_string("jumps.family");
    try {
        if (family == "power") {
            t.jumps = std::make_shared<PowerJumpMeasure>(doc.get_double("jumps.theta"),
                                                         doc.get_double("jumps.rho"),
                                                         doc.get_bool("jumps.closed_form", true));
        } else if (family == "none") {
            t.jumps = std::make_shared<NullJumpMeasure>();
        } else {
            throw ConfigError(doc.source() + ": unknown jump family '" + family + "'");
        }
        t.check();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(doc.source() + ": " + e.what());
    }
    return t;
}

LevyTriplet load_triplet(const std::string& path) {
    return triplet_from_document(KeyValueDocument::load(path));
}

std::string triplet_to_text(const LevyTriplet& t) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "sigma2 = " << t.sigma2 << "\n";
    out << "drift = " << t.drift << "\n";
    out << "alpha = " << t.alpha << "\n";
    out << "jumps.family = " << t.jumps->family() << "\n";
    if (const auto* power = dynamic_cast<const PowerJumpMeasure*>(t.jumps.get())) {
        out << "jumps.theta = " << power->theta() << "\n";
        out << "jumps.rho = " << power->rho() << "\n";
        out << "jumps.closed_form = " << (power->uses_closed_form() ? "true" : "false") << "\n";
    }
    return out.str();
}

}  // namespace gfrag
