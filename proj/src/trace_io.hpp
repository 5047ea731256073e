#ifndef LSPCM_TRACE_IO_HPP
#define LSPCM_TRACE_IO_HPP

#include "common.hpp"
#include "postprocess.hpp"
#include "sampler.hpp"
#include "simulate.hpp"

#include <json.hpp>

#include <cstdio>
#include <string>

namespace lspcm::io {

using Json = nlohmann::ordered_json;

/// One JSON object, no trailing newline. Field order is iteration, p, alpha,
/// loglik, tau, labels (1-based), mu, delta, Z (row-major). Reals use 17
/// significant digits.
std::string format_sample(const sampler::Sample& s);

/// Throws DataError mentioning `line_number` on any schema violation.
sampler::Sample parse_sample(const std::string& line, long line_number);

/// Blank trailing lines are ignored.
std::vector<sampler::Sample> read_trace(const std::string& path);

/// Appends whole lines and flushes after each, so an interrupted run leaves
/// a readable prefix.
class TraceWriter {
public:
    explicit TraceWriter(const std::string& path);
    ~TraceWriter();
    TraceWriter(const TraceWriter&) = delete;
    TraceWriter& operator=(const TraceWriter&) = delete;

    void write(const sampler::Sample& s);

private:
    std::FILE* file_;
    std::string path_;
};

/// Real number with 17 significant digits, as used in every output file.
std::string format_real(double v);

Json to_json(const Matrix& m);
Json to_json(const Vector& v);
Matrix matrix_from_json(const Json& j, const std::string& what);
Vector vector_from_json(const Json& j, const std::string& what);

Json to_json(const model::HyperParams& hp);
Json to_json(const init::InitReport& r);

/// Truth bundle: scenario settings, 1-based labels, tau, Z, realized density.
Json truth_to_json(const simulate::PlantedTruth& t);
post::Truth read_truth(const std::string& path);

/// Writes `j` pretty-printed with a trailing newline. Throws DataError on IO
/// failure.
void write_json(const std::string& path, const Json& j);
Json read_json(const std::string& path);

void write_text(const std::string& path, const std::string& text);

/// CSV of a real matrix, no header.
std::string matrix_csv(const Matrix& m);

}  // namespace lspcm::io

#endif
