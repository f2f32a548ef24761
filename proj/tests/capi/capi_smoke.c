/*
 * Copyright 2026 The SPIN Simulator Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* Compiled as C: the public header must be valid C. */

#include <stdio.h>

#include "spin/spin.h"

int main(void) {
  spin_model* model = NULL;
  spin_status s = spin_model_init("mlp-s", 1, 4, 4, 3, 1, &model);
  if (s != SPIN_OK) {
    fprintf(stderr, "init failed: %s\n", spin_last_error());
    return 1;
  }
  size_t n = spin_model_parameter_count(model);
  spin_model_free(model);
  if (n != 16 * 64 + 64 + 64 * 3 + 3) return 1;
  if (spin_model_load("/nonexistent.ckpt", &model) == SPIN_OK) return 1;
  printf("spin %s api %d ok\n", spin_version(), spin_api_version());
  return 0;
}
