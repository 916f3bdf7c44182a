/* Compiled as C to check that the public header is valid C. */
#include <stdio.h>
#include <string.h>

#include "nhreal/nhreal.h"

int main(void) {
  const double re[4] = {0.0, 4.0, 1.0, 0.0};
  nhr_matrix* m = NULL;
  nhr_eigensystem* es = NULL;
  double wr[2], wi[2];
  if (nhr_matrix_create(2, 2, re, NULL, &m) != NHR_OK) return 1;
  if (nhr_eig(m, &es) != NHR_OK) return 1;
  if (nhr_eigensystem_dim(es) != 2) return 1;
  if (nhr_eigensystem_eigenvalues(es, wr, wi) != NHR_OK) return 1;
  nhr_eigensystem_free(es);
  nhr_matrix_free(m);
  if (wr[0] > -1.999999999 || wr[0] < -2.000000001 || wr[1] < 1.999999999 || wr[1] > 2.000000001) {
    return 1;
  }
  if (nhr_eig(NULL, &es) != NHR_ERR_INVALID_ARGUMENT || strlen(nhr_last_error()) == 0) return 1;
  printf("capi smoke ok: %s\n", nhr_version());
  return 0;
}
