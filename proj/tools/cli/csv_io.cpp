/*
 * Copyright (c) The socest Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "config.hpp"

namespace socest::cli {

namespace {

std::string strip_cr(std::string line)
{
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return line;
}

std::vector<double> parse_row(const std::string& line, std::size_t columns,
                              const std::filesystem::path& path, std::size_t line_no)
{
    std::vector<double> values;
    values.reserve(columns);
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (true) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(p, end, v);
        if (ec != std::errc{} || !std::isfinite(v)) {
            throw InputError(path.string() + ":" + std::to_string(line_no) +
                             ": malformed number");
        }
        values.push_back(v);
        p = ptr;
        if (p == end) {
            break;
        }
        if (*p != ',') {
            throw InputError(path.string() + ":" + std::to_string(line_no) +
                             ": expected ',' between values");
        }
        ++p;
    }
    if (values.size() != columns) {
        throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                         std::to_string(columns) + " columns, found " +
                         std::to_string(values.size()));
    }
    return values;
}

struct Table {
    CsvSchema schema;
    std::vector<std::vector<double>> columns;
};

Table read_table(const std::filesystem::path& path, double dt_s)
{
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw InputError(path.string() + ": empty file");
    }
    line = strip_cr(line);
    Table table;
    if (line == kMeasuredHeader) {
        table.schema = CsvSchema::Measured;
    } else if (line == kMeasuredHeaderRef) {
        table.schema = CsvSchema::MeasuredWithRef;
    } else if (line == kTruthHeader) {
        table.schema = CsvSchema::Truth;
    } else {
        throw InputError(path.string() + ": unrecognised header '" + line + "' (expected '" +
                         kMeasuredHeader + "[,soc_ref]')");
    }
    const std::size_t ncol = table.schema == CsvSchema::Measured ? 3
                             : table.schema == CsvSchema::MeasuredWithRef ? 4
                                                                          : 5;
    table.columns.assign(ncol, {});

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const auto row = parse_row(line, ncol, path, line_no);
        for (std::size_t c = 0; c < ncol; ++c) {
            table.columns[c].push_back(row[c]);
        }
    }
    const auto& t = table.columns[0];
    if (t.empty()) {
        throw InputError(path.string() + ": no data rows");
    }
    if (t.size() > 1) {
        std::vector<double> steps;
        steps.reserve(t.size() - 1);
        for (std::size_t i = 1; i < t.size(); ++i) {
            const double step = t[i] - t[i - 1];
            if (!(step > 0.0)) {
                throw InputError(path.string() + ": time column is not strictly increasing at row " +
                                 std::to_string(i + 1));
            }
            if (std::abs(step - dt_s) > 0.01 * dt_s) {
                throw InputError(path.string() + ": irregular sampling at row " +
                                 std::to_string(i + 1) + " (step " + format_double(step) +
                                 " s, configured dt " + format_double(dt_s) + " s)");
            }
            steps.push_back(step);
        }
        std::nth_element(steps.begin(), steps.begin() + static_cast<long>(steps.size() / 2),
                         steps.end());
        const double median = steps[steps.size() / 2];
        if (std::abs(median - dt_s) > 0.01 * dt_s) {
            throw InputError(path.string() + ": median timestep " + format_double(median) +
                             " s differs from configured dt " + format_double(dt_s) + " s");
        }
    }
    return table;
}

void write_line(std::ofstream& out, std::initializer_list<double> values)
{
    bool first = true;
    for (double v : values) {
        if (!first) {
            out << ',';
        }
        out << format_double(v);
        first = false;
    }
    out << '\n';
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write " + path.string());
    }
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path)
{
    out.flush();
    if (!out) {
        throw InputError("failed writing " + path.string());
    }
}

}  // namespace

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvSchema sniff_schema(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    std::string line;
    std::getline(in, line);
    line = strip_cr(line);
    if (line == kMeasuredHeader) return CsvSchema::Measured;
    if (line == kMeasuredHeaderRef) return CsvSchema::MeasuredWithRef;
    if (line == kTruthHeader) return CsvSchema::Truth;
    throw InputError(path.string() + ": unrecognised header '" + line + "'");
}

MeasuredTrace read_measured_csv(const std::filesystem::path& path, double dt_s)
{
    Table table = read_table(path, dt_s);
    if (table.schema == CsvSchema::Truth) {
        throw InputError(path.string() + ": expected a sample file ('" + kMeasuredHeader +
                         "[,soc_ref]'), found a truth trace");
    }
    MeasuredTrace trace;
    trace.time_s = std::move(table.columns[0]);
    trace.current_a = std::move(table.columns[1]);
    trace.voltage_v = std::move(table.columns[2]);
    if (table.schema == CsvSchema::MeasuredWithRef) {
        trace.soc_ref = std::move(table.columns[3]);
    }
    return trace;
}

TruthTrace read_truth_csv(const std::filesystem::path& path, double dt_s)
{
    Table table = read_table(path, dt_s);
    if (table.schema != CsvSchema::Truth) {
        throw InputError(path.string() + ": expected a truth trace ('" + kTruthHeader + "')");
    }
    TruthTrace trace;
    trace.time_s = std::move(table.columns[0]);
    trace.current_a = std::move(table.columns[1]);
    trace.soc = std::move(table.columns[2]);
    trace.up_v = std::move(table.columns[3]);
    trace.ut_v = std::move(table.columns[4]);
    return trace;
}

void write_measured_csv(const std::filesystem::path& path, const MeasuredTrace& trace)
{
    auto out = open_out(path);
    out << (trace.soc_ref ? kMeasuredHeaderRef : kMeasuredHeader) << '\n';
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (trace.soc_ref) {
            write_line(out, {trace.time_s[i], trace.current_a[i], trace.voltage_v[i],
                             (*trace.soc_ref)[i]});
        } else {
            write_line(out, {trace.time_s[i], trace.current_a[i], trace.voltage_v[i]});
        }
    }
    finish(out, path);
}

void write_truth_csv(const std::filesystem::path& path, const TruthTrace& trace)
{
    auto out = open_out(path);
    out << kTruthHeader << '\n';
    for (std::size_t i = 0; i < trace.size(); ++i) {
        write_line(out, {trace.time_s[i], trace.current_a[i], trace.soc[i], trace.up_v[i],
                         trace.ut_v[i]});
    }
    finish(out, path);
}

void write_filter_trace_csv(const std::filesystem::path& path, const RunResult& result,
                            const FilterRun& run)
{
    auto out = open_out(path);
    out << "t,soc_est,soc_ref,up_est,residual_v,r0,rp,cp,rx,qx_trace\n";
    for (std::size_t i = 0; i < result.steps(); ++i) {
        write_line(out, {result.time_s[i], run.soc_est[i], result.reference[i], run.up_est[i],
                         run.residual_v[i], run.r0[i], run.rp[i], run.cp[i], run.rx[i],
                         run.qx_trace[i]});
    }
    finish(out, path);
}

}  // namespace socest::cli
