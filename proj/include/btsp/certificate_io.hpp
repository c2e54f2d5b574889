#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "btsp/cactus.hpp"
#include "btsp/instance.hpp"

namespace btsp {

// Line-oriented certificate file with the instance embedded, so that it can
// be checked on its own. Layout:
//
//   BTSP-CERT 1
//   INSTANCE            followed by the native instance text
//   END-INSTANCE
//   VERTICES n
//   BETA p/q
//   ORDER v0 v1 ...
//   TOUR-EDGE id u v                    one per tour edge
//   BACKBONE-EDGE id u v                one per backbone edge, ids 0..m-1
//   CACTUS-ARC id u v h1 [h2]          arc endpoints and its backbone class
//   TOUR-CLASS id k1 [k2]
//   PATH-CLASS id h1 [h2 [h3]]
//   DECISION block exit cheap expensive
//   LIGHT ids / HEAVY ids / CHEAP-SIDE ids / EXPENSIVE-SIDE ids
//   WEIGHT (TOUR|BACKBONE|LIGHT|HEAVY|CHEAP-SIDE|EXPENSIVE-SIDE) p/q
//   OPT p/q                             optional
//   END
struct CertificateFile {
  Instance instance;
  TourCertificate certificate;
};

std::string write_certificate(const Instance& inst, const TourCertificate& cert);
// Throws ParseError with the offending line.
CertificateFile parse_certificate(std::string_view text);

void save_certificate(const Instance& inst, const TourCertificate& cert, const std::string& path);
CertificateFile load_certificate(const std::string& path);

// One vertex per line.
std::string write_tour(const std::vector<Vertex>& order);

}  // namespace btsp
