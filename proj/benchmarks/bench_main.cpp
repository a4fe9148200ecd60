#include <benchmark/benchmark.h>

#include <random>

#include <nlohmann/json.hpp>

#include "checks.hpp"
#include "hpack_encoder.hpp"
#include "sbilint/capture/hpack.hpp"
#include "sbilint/openapi/compiler.hpp"
#include "sbilint/report/report.hpp"
#include "sbilint/validate/validator.hpp"

using namespace sbilint;

namespace {

const openapi::SpecIndex& index() {
  static const auto idx = openapi::load_spec_dir(testing::fixture_dir() / "specs");
  return idx;
}

std::vector<testing::Header> request_headers(int i) {
  return {{":method", "POST"},
          {":scheme", "http"},
          {":authority", "udm.example:8080"},
          {":path", "/nudm-ueau/v1/imsi-00101" + std::to_string(1000000000 + i) +
                        "/security-information/generate-auth-data"},
          {"content-type", "application/json"},
          {"accept", "application/json, application/problem+json"},
          {"user-agent", "AUSF-ausf.example"},
          {"3gpp-sbi-correlation-info", "imsi-00101" + std::to_string(i)}};
}

void BM_HpackDecode(benchmark::State& state) {
  testing::HpackEncoder encoder;
  testing::HpackEncoder::Options options;
  options.huffman = state.range(0) != 0;
  std::vector<std::vector<std::uint8_t>> blocks;
  for (int i = 0; i < 256; ++i) blocks.push_back(encoder.encode(request_headers(i), options));
  std::size_t bytes = 0;
  for (const auto& b : blocks) bytes += b.size();
  for (auto _ : state) {
    capture::DynamicTable table;
    for (const auto& b : blocks) benchmark::DoNotOptimize(capture::decode_hpack(b, table, false));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * blocks.size()));
}
BENCHMARK(BM_HpackDecode)->Arg(0)->Arg(1)->ArgName("huffman");

void BM_OperationLookup(benchmark::State& state) {
  const std::vector<std::pair<std::string, std::string>> requests{
      {"GET", "/nnrf-nfm/v1/nf-instances/4947a69a-f61b-4bc1-b9da-47c9c5d14b64"},
      {"POST", "/nnrf-nfm/v1/subscriptions"},
      {"GET", "/nnrf-disc/v1/nf-instances?target-nf-type=UDM&requester-nf-type=AMF"},
      {"POST", "/nsmf-pdusession/v1/sm-contexts/17/modify"},
      {"GET", "/nudm-sdm/v2/imsi-001010000000001/sm-data"},
      {"GET", "/nudr-dr/v1/subscription-data/imsi-1/authentication-data/authentication-subscription"},
      {"GET", "/nowhere/v1/x"}};
  for (auto _ : state) {
    for (const auto& [method, path] : requests) benchmark::DoNotOptimize(index().lookup(method, path));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * requests.size()));
}
BENCHMARK(BM_OperationLookup);

void BM_ValidateProfile(benchmark::State& state) {
  const auto* op = std::get<openapi::OperationMatch>(index().lookup("GET", "/nnrf-nfm/v1/nf-instances/x")).operation;
  const auto* schema = op->response_for(200)->content.at("application/json");
  nlohmann::json profile{{"nfInstanceId", "4947a69a-f61b-4bc1-b9da-47c9c5d14b64"},
                         {"nfType", "AMF"},
                         {"nfStatus", "REGISTERED"},
                         {"fqdn", "amf.example"},
                         {"ipv4Addresses", nlohmann::json::array()}};
  for (int i = 0; i < state.range(0); ++i) profile["ipv4Addresses"].push_back("10.0.0." + std::to_string(i % 250));
  for (auto _ : state) benchmark::DoNotOptimize(validate::validate(profile, *schema));
}
BENCHMARK(BM_ValidateProfile)->Arg(1)->Arg(64)->Arg(1024)->ArgName("addresses");

void BM_AnalyzeCapture(benchmark::State& state) {
  const auto pcap = testing::fixture_dir() / "midstream" / "capture.pcap";
  report::AnalyzeOptions options;
  options.jobs = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(report::analyze_capture(index(), pcap, options));
}
BENCHMARK(BM_AnalyzeCapture)->Arg(1)->Arg(4)->ArgName("jobs");

}  // namespace

BENCHMARK_MAIN();
