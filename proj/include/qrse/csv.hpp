#pragma once

#include <string>
#include <vector>

#include "qrse/ingest.hpp"
#include "qrse/types.hpp"

namespace qrse {

/// Shortest decimal text that round-trips the double exactly.
std::string format_double(double v);

double parse_double(const std::string& text, const std::string& where);

/// Header `date,area,price`.
std::vector<PriceRecord> read_price_csv(const std::string& path);

/// Header `date,area,return`.
std::vector<ReturnRecord> read_returns_csv(const std::string& path);
void write_returns_csv(const std::string& path, const std::vector<ReturnRecord>& returns);

/// Header `x`, one sample per line.
std::vector<double> read_samples_csv(const std::string& path);
void write_samples_csv(const std::string& path, const std::vector<double>& samples);

}  // namespace qrse
