# escape the addition context through a captured continuation
1 + callcc k. throw 41 to k
