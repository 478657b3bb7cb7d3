package main

import (
	"context"

	"cloud.google.com/go/storage"
)

type Request struct {
	Bucket string
	Body   []byte
}

func Handler(ctx context.Context, req Request) error {
	client, err := storage.NewClient(ctx)
	if err != nil {
		return err
	}
	w := client.Bucket(req.Bucket).Object("drop.bin").NewWriter(ctx)
	_, err = w.Write(req.Body)
	return err
}
