// CSV and JSON artifact writers, plus the small CSV reader the plotter uses.
#pragma once

#include "chuarc/chua.hpp"
#include "chuarc/lwe.hpp"
#include "chuarc/pipeline.hpp"
#include "chuarc/tasks.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace chuarc::io {

/// Shortest decimal that round-trips to the same double.
std::string fmt(double v);

/// Every writer starts with "# config_digest=<digest>" when a digest is given.
void write_trace_csv(std::ostream& os, const Trace& trace, const std::string& digest = "");
void write_bifurcation_csv(std::ostream& os, const std::vector<BifurcationPoint>& points,
                           const std::string& digest = "");
void write_spectrum_csv(std::ostream& os, const Spectrum& s, const std::string& digest = "");
void write_state_csv(std::ostream& os, const StateMatrix& x, const std::string& digest = "");

/// Headers per task family: `x,y_teacher`; `x1,x2,sum,product,modlin`;
/// `x,y,class`. LWE datasets go through write_lwe_json instead.
void write_dataset_csv(std::ostream& os, const tasks::Dataset& ds, const std::string& digest = "");

/// Test cases with public key, parameters and seed. The secret is omitted;
/// write_lwe_secret stores it on its own.
void write_lwe_json(std::ostream& os, const lwe::LweDataset& ds, const std::string& digest = "");
void write_lwe_key(std::ostream& os, const lwe::LweDataset& ds);
void write_lwe_secret(std::ostream& os, const lwe::LweDataset& ds);

/// Writes through a temporary file so a crash never leaves half an artifact.
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> comments;  // '#' lines without the marker

    /// Column index by name, or -1.
    int column(const std::string& name) const;
    std::vector<double> numeric(const std::string& name) const;
};

/// Comma-separated, no quoting. Throws ParseError on ragged rows.
Table parse_csv(const std::string& text);

}  // namespace chuarc::io
