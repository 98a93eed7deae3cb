#pragma once

// JSON serialization of reports and the CSV sweeps behind the figure data.

#include "magic/protocols.hpp"
#include "magic/stabilizer.hpp"
#include "magic/witnesses.hpp"

#include "json.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace magic {

using Json = nlohmann::ordered_json;

/// printf("%.15g"); used for every CSV field.
std::string format_number(double v);

/// Row-major list of rows, each entry an [re, im] pair.
Json matrix_json(const CMatrix& m);
/// List of [re, im] amplitude pairs.
Json ket_json(const Ket& k);

Json to_json(const ProtocolReport& rep);
Json to_json(const HullResult& hull, const DensityMatrix& rho);
Json to_json(const OverlapReport& rep);
Json to_json(const RatioGap& gap, int P);
Json stabilizer_dump_json(int n);

struct GridAxis {
  double start = 0.0;
  double stop = 0.0;
  int steps = 1;
  /// `steps` points including both endpoints; a single step yields `start`.
  std::vector<double> points() const;
};

/// "start:stop:steps"; throws ValidationError naming `key` when malformed.
GridAxis parse_axis(std::string_view text, std::string_view key);

/// Header n,q_min,q_max,region_nonempty then one row per n = 1..n_max.
std::string ins_region_csv(int n_max);

/// Header q,r,f_limit,class; q outer, r inner. Points with q + 2r > 1 are INVALID.
/// threads = 0 picks the hardware concurrency.
std::string phase_diagram_csv(const GridAxis& q, const GridAxis& r, unsigned threads = 0);

}  // namespace magic
