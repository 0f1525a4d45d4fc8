#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "capwiener/capacity.hpp"
#include "capwiener/geometry.hpp"
#include "capwiener/params.hpp"

namespace capwiener {

using Json = nlohmann::ordered_json;

// Compact sets serialize by generator so cantor iterates and ball lists
// round-trip exactly; interval variants re-expand from their components.
Json set_to_json(const CompactSet& F);
CompactSet set_from_json(const Json& j);

Json params_to_json(const Params& p);
Params params_from_json(const Json& j);

Json measure_to_json(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_json(const Json& j);

Json vec_to_json(const Vec& v);
Vec vec_from_json(const Json& j);

void write_text(const std::string& path, const std::string& text);
// Columns of equal length; doubles printed with %.17g so values round-trip.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<Vec>& columns);

}  // namespace capwiener
