#ifndef VINESHAP_NORMAL_H_
#define VINESHAP_NORMAL_H_

namespace vineshap {

// Standard normal helpers.
double NormCdf(double x);
double NormPdf(double x);
double NormLogPdf(double x);
// Inverse of NormCdf on (0, 1).
double NormQuantile(double p);

}  // namespace vineshap

#endif  // VINESHAP_NORMAL_H_
